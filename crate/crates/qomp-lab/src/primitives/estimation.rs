use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{require, Noise, NoiseMode, PrimitiveError, QueryCounts, QueryLedger};

/// Probability that one amplitude-estimation run lands within `pi / t`.
pub const SUCCESS_PROBABILITY: f64 = 8.0 / (PI * PI);

/// Result of a simulated estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutcome {
    pub value: f64,
    /// Additive error the estimator promises on success.
    pub tolerance: f64,
    /// `value - truth`; only available because this is a simulation.
    pub deviation: f64,
    pub success: bool,
    /// Oracle calls spent on this estimate.
    pub queries: u64,
}

impl EstimateOutcome {
    pub fn exact(value: f64) -> Self {
        Self { value, tolerance: 0.0, deviation: 0.0, success: true, queries: 0 }
    }
}

/// Amplitude estimation of `a` in `[0, 1]` with `t` evaluations of the
/// circuit whose forward cost is `circuit`. Each evaluation applies the
/// circuit and its inverse once.
pub fn amp_est(
    a: f64,
    t: u64,
    circuit: QueryCounts,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<EstimateOutcome, PrimitiveError> {
    require(t >= 1, || "t must be at least 1".into())?;
    require((-1e-12..=1.0 + 1e-12).contains(&a), || format!("amplitude {a} outside [0, 1]"))?;
    let a = a.clamp(0.0, 1.0);
    let tol = PI / t as f64;
    let value = match noise.mode() {
        NoiseMode::Exact => a,
        NoiseMode::Adversarial => (a + noise.sign() * tol).clamp(0.0, 1.0),
        NoiseMode::Stochastic => {
            let width = if noise.bernoulli(SUCCESS_PROBABILITY) { tol } else { 3.0 * tol };
            noise.uniform(a - width, a + width).clamp(0.0, 1.0)
        }
    };
    ledger.charge_times(circuit.round_trip(), t);
    let deviation = value - a;
    Ok(EstimateOutcome {
        value,
        tolerance: tol,
        deviation,
        success: deviation.abs() <= tol * (1.0 + 1e-12),
        queries: t,
    })
}

/// `2 * ceil(log2(1 / delta)) + 1` repetitions.
pub fn reps_for_confidence(delta: f64) -> usize {
    if !(delta > 0.0 && delta < 1.0) {
        return 1;
    }
    2 * (1.0 / delta).log2().ceil() as usize + 1
}

/// Median of `reps` independent runs (`reps` must be odd).
pub fn powering_median<F>(
    reps: usize,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
    mut run: F,
) -> Result<EstimateOutcome, PrimitiveError>
where
    F: FnMut(&mut Noise, &mut QueryLedger) -> Result<EstimateOutcome, PrimitiveError>,
{
    require(reps % 2 == 1, || format!("repetition count {reps} must be odd"))?;
    let mut runs = (0..reps).map(|_| run(noise, ledger)).collect::<Result<Vec<_>, _>>()?;
    let queries = runs.iter().map(|r| r.queries).sum();
    runs.sort_by(|x, y| x.value.total_cmp(&y.value));
    let mid = runs[reps / 2];
    Ok(EstimateOutcome { queries, success: mid.deviation.abs() <= mid.tolerance * (1.0 + 1e-12), ..mid })
}

/// Most frequent result of `reps` runs; ties go to the smallest value.
pub fn majority_vote<T, E, F>(reps: usize, noise: &mut Noise, ledger: &mut QueryLedger, mut run: F) -> Result<T, E>
where
    T: Ord,
    E: From<PrimitiveError>,
    F: FnMut(&mut Noise, &mut QueryLedger) -> Result<T, E>,
{
    require(reps >= 1, || "need at least one repetition".into())?;
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for _ in 0..reps {
        *counts.entry(run(noise, ledger)?).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    Ok(counts.into_iter().find(|(_, c)| *c == best).map(|(k, _)| k).expect("non-empty"))
}

/// Rounds of fixed-point amplification for success amplitude at least
/// `delta_lb` and target precision `eps`: `ceil(ln(1/eps) / delta_lb)`.
pub fn fixed_point_amplify_cost(delta_lb: f64, eps: f64) -> Result<u64, PrimitiveError> {
    require(delta_lb > 0.0 && delta_lb <= 1.0, || format!("amplitude bound {delta_lb} outside (0, 1]"))?;
    require(eps > 0.0 && eps < 1.0, || format!("precision {eps} outside (0, 1)"))?;
    Ok(((1.0 / eps).ln() / delta_lb).ceil().max(1.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::NoiseModel;

    #[test]
    fn exact_mode_returns_truth_and_charges_t() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let out = amp_est(0.3, 100, QueryCounts::signal(1), &mut noise, &mut ledger).unwrap();
        assert_eq!(out.value, 0.3);
        assert_eq!(ledger.totals.u_s, 100);
        assert_eq!(ledger.totals.u_s_dag, 100);
        assert_eq!(out.queries, 100);
    }

    #[test]
    fn adversarial_hits_the_tolerance() {
        let mut noise = NoiseModel::adversarial(1).stream(0);
        let mut ledger = QueryLedger::new();
        for _ in 0..20 {
            let out = amp_est(0.5, 100, QueryCounts::ZERO, &mut noise, &mut ledger).unwrap();
            assert!((out.deviation.abs() - PI / 100.0).abs() < 1e-15);
        }
    }

    #[test]
    fn clipping_at_the_boundary() {
        let mut noise = NoiseModel::stochastic(4).stream(0);
        let mut ledger = QueryLedger::new();
        for _ in 0..100 {
            let out = amp_est(0.0, 10, QueryCounts::ZERO, &mut noise, &mut ledger).unwrap();
            assert!(out.value >= 0.0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        assert!(amp_est(0.5, 0, QueryCounts::ZERO, &mut noise, &mut ledger).is_err());
        assert!(amp_est(1.5, 3, QueryCounts::ZERO, &mut noise, &mut ledger).is_err());
        assert!(fixed_point_amplify_cost(0.0, 0.1).is_err());
        assert!(fixed_point_amplify_cost(0.5, 1.0).is_err());
    }

    #[test]
    fn repetition_counts() {
        assert_eq!(reps_for_confidence(0.5), 3);
        assert_eq!(reps_for_confidence(0.01), 2 * 7 + 1);
        assert_eq!(fixed_point_amplify_cost(1.0, (-3.0f64).exp()).unwrap(), 3);
    }

    #[test]
    fn majority_ties_pick_smallest() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let mut seq = [5, 2, 5, 2].into_iter();
        let v = majority_vote(4, &mut noise, &mut ledger, |_, _| Ok::<_, PrimitiveError>(seq.next().unwrap())).unwrap();
        assert_eq!(v, 2);
    }

    #[test]
    fn median_needs_odd_reps() {
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let r = powering_median(2, &mut noise, &mut ledger, |_, _| Ok(EstimateOutcome::exact(1.0)));
        assert!(r.is_err());
    }
}
