use super::linalg::frobenius;
use super::{CMatrix, ModelError};

/// Exponents scanned by [`mu_grid`].
pub const MU_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn magnitude_pow(v: f64, e: f64) -> f64 {
    // |x|^0 counts non-zeros
    if v == 0.0 {
        0.0
    } else {
        v.powf(e)
    }
}

/// `sqrt(s_{2p}(A) * s_{2(1-p)}(A^T))` where `s_q(A)` is the largest row sum of
/// `|a_ij|^q`.
pub fn mu_p(a: &CMatrix, p: f64) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::InvalidExponent(p));
    }
    if a.is_empty() {
        return Err(ModelError::Empty);
    }
    let (n, m) = a.shape();
    let row_exp = 2.0 * p;
    let col_exp = 2.0 * (1.0 - p);
    let rows =
        (0..n).map(|i| (0..m).map(|j| magnitude_pow(a[(i, j)].norm(), row_exp)).sum::<f64>()).fold(0.0, f64::max);
    let cols =
        (0..m).map(|j| (0..n).map(|i| magnitude_pow(a[(i, j)].norm(), col_exp)).sum::<f64>()).fold(0.0, f64::max);
    Ok((rows * cols).sqrt())
}

/// Minimum of `mu_p` over [`MU_GRID`], with the exponent attaining it
/// (smallest exponent on ties).
pub fn mu_grid(a: &CMatrix) -> Result<(f64, f64), ModelError> {
    let mut best = (f64::NAN, f64::INFINITY);
    for &p in &MU_GRID {
        let v = mu_p(a, p)?;
        if v < best.1 {
            best = (p, v);
        }
    }
    Ok(best)
}

/// `min(||A||_F, min_p mu_p(A))`, the normalization used by QRAM block encodings.
pub fn mu_best(a: &CMatrix) -> Result<f64, ModelError> {
    Ok(mu_grid(a)?.1.min(frobenius(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::C64;

    #[test]
    fn identity_has_unit_mu() {
        let a = CMatrix::identity(6, 6);
        assert!((mu_p(&a, 0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_ones_two_by_two() {
        let a = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!((mu_p(&a, 0.5).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exponent_out_of_range() {
        let a = CMatrix::identity(2, 2);
        assert_eq!(mu_p(&a, 1.5), Err(ModelError::InvalidExponent(1.5)));
    }

    #[test]
    fn grid_can_exceed_frobenius_but_best_cannot() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let a = CMatrix::from_row_slice(2, 2, &[one, one, one, zero]);
        let (_, grid) = mu_grid(&a).unwrap();
        assert!(grid > frobenius(&a));
        assert!((mu_best(&a).unwrap() - 3f64.sqrt()).abs() < 1e-15);
    }
}
