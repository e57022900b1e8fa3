use super::{amp_est, powering_median, require, EstimateOutcome, Noise, PrimitiveError, QueryLedger, StateRef};
use crate::model::linalg::inner;

/// Real and imaginary parts of `<v|c>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProductEstimate {
    pub re: EstimateOutcome,
    pub im: EstimateOutcome,
}

/// Hadamard-test estimate of `<v|c>`, each part within `eps`.
///
/// The ancilla is measured in `|1>` with probability `(1 - Re<v|c>) / 2`
/// (resp. the imaginary part after an S gate); that probability is estimated
/// to `eps / 2` and mapped back.
pub fn hadamard_inner_product(
    v: StateRef<'_>,
    c: StateRef<'_>,
    eps: f64,
    delta: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<InnerProductEstimate, PrimitiveError> {
    require(eps > 0.0, || format!("precision {eps} must be positive"))?;
    require(v.amplitudes.len() == c.amplitudes.len(), || "state dimensions differ".into())?;
    let truth = inner(v.amplitudes, c.amplitudes);
    let t = (std::f64::consts::PI / (eps / 2.0)).ceil() as u64;
    let circuit = v.circuit + c.circuit;
    let reps = noise.reps(delta);
    let part = |x: f64, noise: &mut Noise, ledger: &mut QueryLedger| {
        let p = ((1.0 - x) / 2.0).clamp(0.0, 1.0);
        let out = powering_median(reps, noise, ledger, |n, l| amp_est(p, t, circuit, n, l))?;
        let value = if noise.is_exact() { x } else { 1.0 - 2.0 * out.value };
        let deviation = value - x;
        Ok::<_, PrimitiveError>(EstimateOutcome {
            value,
            tolerance: eps,
            deviation,
            success: deviation.abs() <= eps * (1.0 + 1e-12),
            queries: out.queries,
        })
    };
    let re = part(truth.re, noise, ledger)?;
    let im = part(truth.im, noise, ledger)?;
    Ok(InnerProductEstimate { re, im })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::C64;
    use crate::primitives::{NoiseModel, QueryCounts};

    fn state(v: &[C64]) -> StateRef<'_> {
        StateRef { amplitudes: v, circuit: QueryCounts::signal(1) }
    }

    #[test]
    fn identical_states() {
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let est = hadamard_inner_product(state(&v), state(&v), 0.1, 0.1, &mut noise, &mut ledger).unwrap();
        assert_eq!(est.re.value, 1.0);
        assert_eq!(est.im.value, 0.0);
    }

    #[test]
    fn orthogonal_states_within_tolerance() {
        let v = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let c = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let mut noise = NoiseModel::adversarial(2).stream(0);
        let mut ledger = QueryLedger::new();
        let est = hadamard_inner_product(state(&v), state(&c), 0.05, 0.1, &mut noise, &mut ledger).unwrap();
        assert!(est.re.value.abs() <= 0.05 + 1e-12);
        assert!(est.im.value.abs() <= 0.05 + 1e-12);
    }

    #[test]
    fn amplified_charges_repetitions() {
        let v = [C64::new(1.0, 0.0)];
        let mut noise = NoiseModel::stochastic(2).amplified().stream(0);
        let mut ledger = QueryLedger::new();
        hadamard_inner_product(state(&v), state(&v), 0.5, 0.25, &mut noise, &mut ledger).unwrap();
        let t = (std::f64::consts::PI / 0.25).ceil() as u64;
        // two parts, five repetitions each, two signal calls per evaluation
        assert_eq!(ledger.totals.u_s, 2 * 5 * t * 2);
    }
}
