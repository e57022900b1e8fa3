//! Simulator for quantum orthogonal matching pursuit (QOMP).
//!
//! The quantum routines are executed classically: every estimator computes the
//! exact quantity, perturbs it according to a [`primitives::NoiseModel`], and
//! charges its query cost to a [`primitives::QueryLedger`]. Classical OMP,
//! brute-force sparse recovery and the exact-cover reduction live alongside so
//! that the quantum pipeline can be checked against ground truth.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod classical;
pub mod cli;
pub mod exec;
pub mod hardness;
pub mod instances;
pub mod model;
pub mod primitives;
pub mod qomp;
pub mod qsvt;
pub mod recovery;
