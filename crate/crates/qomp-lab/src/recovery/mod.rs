//! End-to-end sparse recovery: support recovery with QOMP, coefficient
//! states, sparse tomography of the coefficients, and quantum estimation of
//! the mutual incoherence.

mod incoherence;
mod support;
mod tomography;

pub use incoherence::{estimate_mutual_incoherence_q, MuEstimate};
pub use support::{check_identifiability, support_recovery, SupportRecovery, SupportRecoveryOptions};
pub use tomography::{
    coefficients_state, orthogonal_sparse_tomography, sparse_coefficient_tomography, tomography_pipeline, Certificates,
    PromiseCheck, SparseAmplitudes, TomographyBudget, TomographyReport, SPARSITY_CONSTANT,
};

use crate::classical::ClassicalError;
use crate::model::ModelError;
use crate::primitives::PrimitiveError;
use crate::qomp::QompError;
use crate::qsvt::QsvtError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecoveryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{count} amplitudes exceed the sparsity threshold, more than {k}")]
    ThresholdViolated { count: usize, k: usize },
    #[error(transparent)]
    Qomp(#[from] QompError),
    #[error(transparent)]
    Qsvt(#[from] QsvtError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
