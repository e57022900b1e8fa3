//! Dictionaries, signals, supports and the exact linear algebra used as ground
//! truth by every other module.

mod dictionary;
mod incoherence;
mod io;
mod kp_tree;
pub mod linalg;
mod mu;

pub use dictionary::{Dictionary, Signal, Support};
pub use incoherence::mutual_incoherence;
pub use io::{read_dictionary_csv, MatrixRecord};
pub use kp_tree::KpTree;
pub use mu::{mu_best, mu_grid, mu_p, MU_GRID};

/// Complex scalar.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix (column-major).
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("index {0} appears twice in the support")]
    DuplicateIndex(usize),
    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent p = {0} outside [0, 1]")]
    InvalidExponent(f64),
    #[error("at least two atoms are required")]
    TooFewAtoms,
    #[error("empty matrix")]
    Empty,
    #[error("malformed input: {0}")]
    Parse(String),
}
