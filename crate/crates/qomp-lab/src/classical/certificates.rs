use super::ClassicalError;
use crate::model::linalg;
use crate::model::{CVector, Dictionary, Support};

/// Exact recovery value `max_{psi outside the support} ||D_opt^+ psi||_1`.
///
/// OMP is guaranteed to pick only atoms from `optimal` when this is below one,
/// the noisy quantum variant when it is below `1 - eta`. Zero when every atom
/// is in the support.
pub fn erc_value(d: &Dictionary, optimal: &Support) -> Result<f64, ClassicalError> {
    optimal.check_range(d.m())?;
    let outside = optimal.complement(d.m());
    if outside.is_empty() {
        return Ok(0.0);
    }
    let a = d.columns(optimal);
    if linalg::thin_svd(&a).rank() < optimal.len() {
        return Err(ClassicalError::RankDeficient);
    }
    let pinv = linalg::pinv(&a);
    Ok(outside
        .into_iter()
        .map(|j| {
            let psi = CVector::from_column_slice(d.atom(j));
            (&pinv * psi).iter().map(|z| z.norm()).sum::<f64>()
        })
        .fold(0.0, f64::max))
}

/// Upper bound `K mu / (1 - (K - 1) mu)` on the exact recovery value.
pub fn erc_bound(k: usize, mu: f64) -> f64 {
    k as f64 * mu / (1.0 - (k as f64 - 1.0) * mu)
}

/// `(1 - eta) / (2 - eta) * (1 / mu + 1)`.
pub fn mi_sparsity_bound(mu: f64, eta: f64) -> f64 {
    if mu == 0.0 {
        return f64::INFINITY;
    }
    (1.0 - eta) / (2.0 - eta) * (1.0 / mu + 1.0)
}

/// Whether `k < (1 - eta) / (2 - eta) * (1 / mu + 1)`.
pub fn mi_condition(mu: f64, k: usize, eta: f64) -> bool {
    (k as f64) < mi_sparsity_bound(mu, eta)
}

/// Lower bound on the smallest singular value of any `k` unit atoms of a
/// dictionary with coherence `mu` (Gershgorin on the Gram matrix).
pub fn gershgorin_gamma(k: usize, mu: f64) -> f64 {
    (1.0 - (k.saturating_sub(1) as f64) * mu).max(0.0).sqrt()
}
