use serde::{Deserialize, Serialize};

use super::RecoveryError;
use crate::exec::{map_indexed, Execution};
use crate::model::{Dictionary, ModelError};
use crate::primitives::{
    find_max_over_estimates, hadamard_inner_product, Noise, NoiseModel, QueryCounts, QueryLedger, StateRef,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub value: f64,
    /// Promised additive error: `eps` from each pair estimate plus `2 eps`
    /// from max-finding.
    pub tolerance: f64,
    /// Selected ordered pair.
    pub pair: (usize, usize),
}

/// Max-finding over the `m (m - 1)` ordered atom pairs with an oracle
/// estimating `|<d_i|d_j>|` to `eps`.
pub fn estimate_mutual_incoherence_q(
    d: &Dictionary,
    eps: f64,
    delta: f64,
    execution: Execution,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<MuEstimate, RecoveryError> {
    let m = d.m();
    if m < 2 {
        return Err(ModelError::TooFewAtoms.into());
    }
    if !(eps > 0.0) {
        return Err(RecoveryError::InvalidArgument(format!("precision {eps} must be positive")));
    }
    let pairs = m * (m - 1);
    let pair = |p: usize| {
        let i = p / (m - 1);
        let r = p % (m - 1);
        (i, if r >= i { r + 1 } else { r })
    };
    let part_eps = eps / std::f64::consts::SQRT_2;
    let part_delta = delta / (2.0 * pairs as f64);
    let oracle = |p: usize, noise: &mut Noise| {
        let (i, j) = pair(p);
        let a = StateRef { amplitudes: d.atom(i), circuit: QueryCounts::dictionary(1) };
        let b = StateRef { amplitudes: d.atom(j), circuit: QueryCounts::dictionary(1) };
        let mut scratch = QueryLedger::new();
        let est = hadamard_inner_product(a, b, part_eps, part_delta, noise, &mut scratch)?;
        let value = if noise.is_exact() {
            crate::model::linalg::inner(d.atom(i), d.atom(j)).norm()
        } else {
            est.re.value.hypot(est.im.value)
        };
        Ok::<_, RecoveryError>((value, scratch.totals))
    };
    let scored: Vec<Result<(f64, QueryCounts), RecoveryError>> = if noise.is_exact() {
        map_indexed(execution, pairs, |p| oracle(p, &mut NoiseModel::exact().stream(0)))
    } else {
        (0..pairs).map(|p| oracle(p, noise)).collect()
    };
    let mut values = Vec::with_capacity(pairs);
    let mut per_query = QueryCounts::ZERO;
    for r in scored {
        let (v, c) = r?;
        values.push(v);
        per_query = per_query.max(c);
    }
    let out = find_max_over_estimates(&values, per_query, delta, QueryCounts::aux(1), noise, ledger)?;
    Ok(MuEstimate { value: out.value, tolerance: 3.0 * eps, pair: pair(out.index) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mutual_incoherence, CMatrix, C64};

    #[test]
    fn orthonormal_dictionary() {
        let d = Dictionary::new(CMatrix::identity(4, 4)).unwrap();
        let mut noise = NoiseModel::adversarial(1).stream(0);
        let mut ledger = QueryLedger::new();
        let est = estimate_mutual_incoherence_q(&d, 0.05, 0.1, Execution::Sequential, &mut noise, &mut ledger).unwrap();
        assert!(est.value <= 0.15);
    }

    #[test]
    fn exact_mode_matches_classical_value() {
        let d = Dictionary::new(CMatrix::from_fn(3, 5, |i, j| C64::new((i * j) as f64 - 1.0, (i + j) as f64 * 0.3)))
            .unwrap();
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let est = estimate_mutual_incoherence_q(&d, 0.05, 0.1, Execution::default(), &mut noise, &mut ledger).unwrap();
        assert_eq!(est.value, mutual_incoherence(&d, Execution::Sequential).unwrap());
    }

    #[test]
    fn pair_enumeration_skips_the_diagonal() {
        let d = Dictionary::new(CMatrix::identity(3, 3)).unwrap();
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let est = estimate_mutual_incoherence_q(&d, 0.1, 0.1, Execution::Sequential, &mut noise, &mut ledger).unwrap();
        assert_ne!(est.pair.0, est.pair.1);
        assert_eq!(est.value, 0.0);
    }
}
