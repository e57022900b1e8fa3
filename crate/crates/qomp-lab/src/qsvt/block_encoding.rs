use serde::{Deserialize, Serialize};

use super::QsvtError;
use crate::model::linalg::{frobenius, operator_norm};
use crate::model::{mu_best, mu_p, CMatrix, Dictionary, Support};
use crate::primitives::QueryCounts;

/// How dictionary columns are loaded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessMode {
    /// One column-access query per atom, normalization `sqrt(k)`.
    #[default]
    Oracular,
    /// Data-structure access with normalization `mu(A)`.
    Qram,
}

/// Simulated `(alpha, q, epsilon)` block encoding: the top-left block of the
/// unitary is `matrix / alpha` up to operator-norm error `epsilon / alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEncoding {
    pub matrix: CMatrix,
    pub alpha: f64,
    pub ancillas: u32,
    pub epsilon: f64,
    /// Queries spent per application.
    pub cost: QueryCounts,
}

impl BlockEncoding {
    /// A zero matrix yields `alpha = 0`; such an encoding cannot be applied.
    pub fn is_degenerate(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn adjoint(&self) -> BlockEncoding {
        BlockEncoding {
            matrix: self.matrix.adjoint(),
            alpha: self.alpha,
            ancillas: self.ancillas,
            epsilon: self.epsilon,
            cost: self.cost.adjoint(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// `ceil(log2(n + m))`.
pub fn ancilla_count(n: usize, m: usize) -> u32 {
    (n + m).max(2).next_power_of_two().trailing_zeros()
}

/// Column-oracle encoding with `alpha = ||A||_F`, exact for unit columns.
pub fn block_encode_oracular(a: &CMatrix) -> BlockEncoding {
    BlockEncoding {
        matrix: a.clone(),
        alpha: frobenius(a),
        ancillas: ancilla_count(a.nrows(), a.ncols()),
        epsilon: 0.0,
        cost: QueryCounts::dictionary(1) + QueryCounts::aux(1),
    }
}

/// Data-structure encoding with `alpha = mu_p(A)`.
pub fn block_encode_qram(a: &CMatrix, p: f64) -> Result<BlockEncoding, QsvtError> {
    let alpha = mu_p(a, p)?;
    Ok(BlockEncoding { alpha, ..block_encode_oracular(a) })
}

/// Data-structure encoding with the smaller of `||A||_F` and the grid
/// minimum of `mu_p`.
pub fn block_encode_qram_best(a: &CMatrix) -> Result<BlockEncoding, QsvtError> {
    let alpha = mu_best(a)?;
    Ok(BlockEncoding { alpha, ..block_encode_oracular(a) })
}

/// Encoding of the selected columns `D_Lambda` (compacted to `n x k`).
pub fn encode_support(d: &Dictionary, support: &Support, access: AccessMode) -> Result<BlockEncoding, QsvtError> {
    let cols = d.columns(support);
    let mut be = match access {
        AccessMode::Oracular => block_encode_oracular(&cols),
        AccessMode::Qram => block_encode_qram_best(&cols)?,
    };
    be.ancillas = ancilla_count(d.n(), d.m());
    Ok(be)
}

/// Re-normalizes to `alpha' = ||A||` (error scales by `alpha' / alpha`).
pub fn be_rescale(u: &BlockEncoding) -> Result<BlockEncoding, QsvtError> {
    if u.alpha == 0.0 {
        return Err(QsvtError::ZeroAlpha);
    }
    let new_alpha = operator_norm(&u.matrix);
    if new_alpha == 0.0 {
        return Err(QsvtError::ZeroAlpha);
    }
    Ok(BlockEncoding { alpha: new_alpha, epsilon: u.epsilon * new_alpha / u.alpha, ..u.clone() })
}

/// Encoding of `A B` with `alpha = alpha_A alpha_B`, ancillas added and error
/// `alpha_A eps_B + alpha_B eps_A`.
pub fn be_product(u: &BlockEncoding, v: &BlockEncoding) -> Result<BlockEncoding, QsvtError> {
    if u.ncols() != v.nrows() {
        return Err(QsvtError::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            u.nrows(),
            u.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    Ok(BlockEncoding {
        matrix: &u.matrix * &v.matrix,
        alpha: u.alpha * v.alpha,
        ancillas: u.ancillas + v.ancillas,
        epsilon: u.alpha * v.epsilon + v.alpha * u.epsilon,
        cost: u.cost + v.cost,
    })
}
