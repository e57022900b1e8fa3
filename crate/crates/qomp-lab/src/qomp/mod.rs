//! Quantum orthogonal matching pursuit: the atom-selection oracle, the
//! residual-norm exit test, precision budgets and query accounting.

mod budget;
mod cost;
mod oracle;
mod run;

pub use budget::PrecisionBudget;
pub use cost::iteration_cost_model;
pub use oracle::{atom_oracle, residual_norm_estimate, select_atom, IterationContext, ResidualEstimate, Selection};
pub use run::{qomp_run, Gamma, IterationRecord, QompConfig, QompRun};

use crate::model::ModelError;
use crate::primitives::PrimitiveError;
use crate::qsvt::QsvtError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QompError {
    #[error("signal norm {0} is below 1")]
    NormTooSmall(f64),
    #[error("atom {0} is already selected")]
    AtomAlreadySelected(usize),
    #[error("every atom is already selected")]
    EmptyComplement,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Qsvt(#[from] QsvtError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
