//! Matrix-level simulation of block encodings and singular value
//! transformation, and the routines built on them: column-space projection,
//! matrix-vector products with norm estimation, and a linear-system solver.

mod block_encoding;
mod matvec;
mod poly;
mod projection;
mod qlss;
mod svt;

pub use block_encoding::{
    ancilla_count, be_product, be_rescale, block_encode_oracular, block_encode_qram, block_encode_qram_best,
    encode_support, AccessMode, BlockEncoding,
};
pub use matvec::{matvec_and_norm, MatvecOutput, MatvecVariant};
pub use poly::{
    antisym_step_poly, sign_poly, sign_poly_cached, sign_poly_degree, OddPolynomial, PolynomialRecord,
    SIGN_DEGREE_CONSTANT,
};
pub use projection::{
    colspace_projector_be, colspace_projector_cost, column_space_projection, PolyKind, ProjectionOutput,
    ProjectionVariant, PROJECTOR_PRECISION_CONSTANT,
};
pub use qlss::{qlss_cost, qlss_solve};
pub use svt::{svt_apply, svt_apply_with_precision, svt_cost};

use crate::model::ModelError;
use crate::primitives::PrimitiveError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QsvtError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("normalization factor is zero")]
    ZeroAlpha,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("polynomial failed validation after retries: {0}")]
    ConstructionFailed(String),
    #[error("block-encoding error {have} exceeds the admissible {need}")]
    PrecisionInsufficient { have: f64, need: f64 },
    #[error("gamma {gamma} exceeds the smallest non-zero singular value {sigma}")]
    GammaTooLarge { gamma: f64, sigma: f64 },
    #[error("projection of the input vanishes")]
    ZeroProjection,
    #[error("norm estimation exceeded its expected-time cutoff")]
    NonTerminating,
    #[error("smallest singular value {sigma} is below gamma {gamma}")]
    IllConditioned { gamma: f64, sigma: f64 },
    #[error("lower bound {gamma} exceeds the true ratio {ratio}")]
    BoundViolated { gamma: f64, ratio: f64 },
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `max(1, ln x)`, the value used for logarithmic cost factors.
pub(crate) fn log_factor(x: f64) -> f64 {
    if x > std::f64::consts::E {
        x.ln()
    } else {
        1.0
    }
}
