use super::{amp_est, powering_median, require, EstimateOutcome, Noise, PrimitiveError, QueryLedger, StateRef};
use crate::model::linalg::norm;

/// Estimate of `|| alpha |v> - beta |c> ||` within `eps`.
///
/// The underlying circuit exposes the amplitude
/// `|| alpha v - beta c || / (2 alpha beta)`, which only stays below one when
/// both weights are at least one. Smaller weights are therefore scaled up by a
/// common factor first, and the estimate is scaled back down.
#[allow(clippy::too_many_arguments)]
pub fn weighted_distance_estimate(
    alpha: f64,
    v: StateRef<'_>,
    beta: f64,
    c: StateRef<'_>,
    eps: f64,
    delta: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<EstimateOutcome, PrimitiveError> {
    require(alpha > 0.0 && beta > 0.0, || format!("weights must be positive (got {alpha}, {beta})"))?;
    require(eps > 0.0, || format!("precision {eps} must be positive"))?;
    require(v.amplitudes.len() == c.amplitudes.len(), || "state dimensions differ".into())?;
    let diff: Vec<_> = v.amplitudes.iter().zip(c.amplitudes).map(|(x, y)| x * alpha - y * beta).collect();
    let truth = norm(&diff);
    let lift = (1.0 / alpha.min(beta)).max(1.0);
    let (a, b) = (alpha * lift, beta * lift);
    let amplitude = (truth * lift / (2.0 * a * b)).min(1.0);
    let t = (2.0 * a * b * std::f64::consts::PI / (lift * eps)).ceil() as u64;
    let circuit = v.circuit + c.circuit;
    let reps = noise.reps(delta);
    let out = powering_median(reps, noise, ledger, |n, l| amp_est(amplitude, t, circuit, n, l))?;
    let value = if noise.is_exact() { truth } else { out.value * 2.0 * a * b / lift };
    let deviation = value - truth;
    Ok(EstimateOutcome {
        value,
        tolerance: eps,
        deviation,
        success: deviation.abs() <= eps * (1.0 + 1e-12),
        queries: out.queries,
    })
}
