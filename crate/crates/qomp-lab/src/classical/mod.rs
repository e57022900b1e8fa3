//! Classical reference solvers: both OMP formulations, exhaustive sparse
//! recovery, and the recovery certificates.

mod brute;
mod certificates;
mod omp;

pub use brute::{brute_force_l0, count_subsets, SUBSET_GUARD};
pub use certificates::{erc_bound, erc_value, gershgorin_gamma, mi_condition, mi_sparsity_bound};
pub use omp::{omp, omp_projection, RecoveryResult, Status};

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassicalError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("signal length {got} does not match dictionary rows {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{subsets} candidate supports exceed the enumeration guard")]
    CombinatorialBlowup { subsets: u128 },
    #[error("selected atoms are linearly dependent")]
    RankDeficient,
    #[error(transparent)]
    Model(#[from] ModelError),
}
