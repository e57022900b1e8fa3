use super::ClassicalError;
use crate::model::{CVector, Dictionary, Signal, Support};

/// Upper limit on the number of supports [`brute_force_l0`] will try.
pub const SUBSET_GUARD: u128 = 10_000_000;

/// `sum_{k <= k_max} C(m, k)`.
pub fn count_subsets(m: usize, k_max: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=k_max.min(m) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((m - k) as u128) / (k as u128 + 1);
    }
    total
}

/// Smallest support (lexicographically first among equals) whose
/// least-squares fit leaves a residual of at most `eps`, searching sizes up to
/// `k_max`.
///
/// Residuals within `1e-12 * max(1, ||s||)` of `eps` count as meeting it.
pub fn brute_force_l0(
    d: &Dictionary,
    s: &Signal,
    eps: f64,
    k_max: usize,
) -> Result<Option<(Support, CVector)>, ClassicalError> {
    if s.len() != d.n() {
        return Err(ClassicalError::DimensionMismatch { expected: d.n(), got: s.len() });
    }
    let subsets = count_subsets(d.m(), k_max);
    if subsets > SUBSET_GUARD {
        return Err(ClassicalError::CombinatorialBlowup { subsets });
    }
    let threshold = eps + 1e-12 * s.norm().max(1.0);
    for k in 0..=k_max.min(d.m()) {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let support = Support::from_indices(combo.iter().copied())?;
            let (phi, _) = d.project(&support, s.as_slice());
            if (s.vector() - phi).norm() <= threshold {
                let x = d.least_squares(&support, s.as_slice());
                return Ok(Some((support, x)));
            }
            if !next_combination(&mut combo, d.m()) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances to the next `k`-subset of `0..m` in lexicographic order.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < m - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
