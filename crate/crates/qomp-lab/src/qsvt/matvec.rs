use std::f64::consts::PI;

use super::{BlockEncoding, QsvtError};
use crate::model::{CVector, Signal};
use crate::primitives::{
    amp_est, fixed_point_amplify_cost, perturb_state, powering_median, EstimateOutcome, Noise, NoiseMode,
    PreparedState, QueryCounts, QueryLedger,
};

/// Which output of the matrix-vector routine is wanted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatvecVariant {
    /// Estimate of `||Ax|| / ||x||` within additive `eps`.
    Additive,
    /// Estimate of `||Ax|| / ||x||` within relative `eps`, in expected time.
    Relative,
    /// State `Ax / ||Ax||` within `eps`, given `gamma <= ||Ax|| / ||x||`.
    StateWithBound { gamma: f64 },
    /// State `Ax / ||Ax||` within `eps` without a known lower bound.
    State,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatvecOutput {
    Estimate(EstimateOutcome),
    State(PreparedState),
}

/// Where the encoding of `A` comes from: a fixed one, or one built to order
/// for a requested operator-norm precision.
pub(crate) enum EncodingSource<'a> {
    Fixed { cost: QueryCounts, epsilon: f64 },
    Tunable(&'a dyn Fn(f64) -> Result<QueryCounts, QsvtError>),
}

/// Shared machinery of the matrix-vector routines. Works on the ratio
/// `||Ax|| / ||x||`.
pub(crate) struct NormProblem<'a> {
    pub image: CVector,
    pub x_norm: f64,
    pub alpha: f64,
    pub input_cost: QueryCounts,
    pub source: EncodingSource<'a>,
}

impl NormProblem<'_> {
    pub fn ratio(&self) -> f64 {
        self.image.norm() / self.x_norm
    }

    /// One application of `U_A U_x` at encoding precision `precision`, and
    /// the error actually provisioned.
    fn circuit(&self, precision: f64) -> Result<(QueryCounts, f64), QsvtError> {
        match &self.source {
            EncodingSource::Fixed { cost, epsilon } => {
                if *epsilon > precision * (1.0 + 1e-12) {
                    return Err(QsvtError::PrecisionInsufficient { have: *epsilon, need: precision });
                }
                Ok((*cost + self.input_cost, *epsilon))
            }
            EncodingSource::Tunable(build) => Ok((build(precision)? + self.input_cost, precision)),
        }
    }

    /// Additive estimate of the ratio: half of `eps` for the encoding, half
    /// for amplitude estimation with `t = ceil(2 alpha pi / eps)`.
    pub fn additive(
        &self,
        eps: f64,
        delta: f64,
        noise: &mut Noise,
        ledger: &mut QueryLedger,
    ) -> Result<EstimateOutcome, QsvtError> {
        if !(eps > 0.0) {
            return Err(QsvtError::InvalidArgument(format!("precision {eps} must be positive")));
        }
        if self.alpha == 0.0 {
            return Err(QsvtError::ZeroAlpha);
        }
        let truth = self.ratio();
        let (circuit, provisioned) = self.circuit(eps / 2.0)?;
        let t = (2.0 * self.alpha * PI / eps).ceil() as u64;
        let amplitude = (truth / self.alpha).min(1.0);
        let reps = noise.reps(delta);
        let run = powering_median(reps, noise, ledger, |n, l| amp_est(amplitude, t, circuit, n, l))?;
        let value = match noise.mode() {
            NoiseMode::Exact => truth,
            mode => {
                // the encoding error pushes in the same direction as the estimation error
                let weight = if mode == NoiseMode::Adversarial { 1.0 } else { noise.uniform(0.0, 1.0) };
                let direction = if run.deviation != 0.0 { run.deviation.signum() } else { noise.sign() };
                (run.value * self.alpha + direction * weight * provisioned).max(0.0)
            }
        };
        let deviation = value - truth;
        Ok(EstimateOutcome {
            value,
            tolerance: eps,
            deviation,
            success: deviation.abs() <= eps * (1.0 + 1e-12),
            queries: run.queries,
        })
    }

    /// Relative estimate of the ratio by doubling `t` until
    /// `pi / t <= (eps/2) a / (1 + eps/2)`, cut off at four times the expected
    /// total work.
    pub fn relative(
        &self,
        eps: f64,
        noise: &mut Noise,
        ledger: &mut QueryLedger,
    ) -> Result<EstimateOutcome, QsvtError> {
        if !(eps > 0.0) {
            return Err(QsvtError::InvalidArgument(format!("precision {eps} must be positive")));
        }
        let truth = self.ratio();
        if self.alpha == 0.0 || truth / self.alpha < 1e-15 {
            return Err(QsvtError::NonTerminating);
        }
        let amplitude = (truth / self.alpha).min(1.0);
        let (circuit, _) = self.circuit(eps * truth / 2.0)?;
        let half = eps / 2.0;
        let expected = 2.0 * (PI * (1.0 + half) / (half * amplitude)).ceil();
        let cutoff = 4.0 * expected;
        let mut spent = 0u64;
        let mut t = 1u64;
        loop {
            let run = amp_est(amplitude, t, circuit, noise, ledger)?;
            spent += t;
            if PI / t as f64 <= half * run.value / (1.0 + half) {
                let value = if noise.is_exact() { truth } else { run.value * self.alpha };
                let deviation = value - truth;
                return Ok(EstimateOutcome {
                    value,
                    tolerance: eps * truth,
                    deviation,
                    success: deviation.abs() <= eps * truth * (1.0 + 1e-12),
                    queries: spent,
                });
            }
            if spent as f64 > cutoff {
                return Err(QsvtError::NonTerminating);
            }
            t *= 2;
        }
    }

    /// Fixed-point amplification of the `|0>` branch, given a lower bound on
    /// the ratio.
    pub fn state_with_bound(
        &self,
        gamma: f64,
        eps: f64,
        noise: &mut Noise,
        ledger: &mut QueryLedger,
    ) -> Result<PreparedState, QsvtError> {
        let truth = self.ratio();
        if truth == 0.0 {
            return Err(QsvtError::ZeroProjection);
        }
        if !(gamma > 0.0) || gamma > truth * (1.0 + 1e-12) {
            return Err(QsvtError::BoundViolated { gamma, ratio: truth });
        }
        if !(eps > 0.0) {
            return Err(QsvtError::InvalidArgument(format!("precision {eps} must be positive")));
        }
        let encoding_eps = eps.min(1.0) * gamma / 3.0;
        let (circuit, _) = self.circuit(encoding_eps)?;
        let success_lb = ((gamma - encoding_eps) / self.alpha).min(1.0);
        let rounds = fixed_point_amplify_cost(success_lb, (eps / 3.0).min(0.5))?;
        let prep = circuit.scaled(rounds);
        ledger.charge(prep);
        let target = self.image.normalize();
        Ok(PreparedState { amplitudes: perturb_state(&target, eps, noise), circuit: prep })
    }

    /// Bootstraps a bound from a relative estimate at error 1/2 and sets
    /// `gamma = 2/3` of it.
    pub fn state_auto(
        &self,
        eps: f64,
        noise: &mut Noise,
        ledger: &mut QueryLedger,
    ) -> Result<PreparedState, QsvtError> {
        let bootstrap = self.relative(0.5, noise, ledger)?;
        let gamma = (2.0 * bootstrap.value / 3.0).min(self.ratio());
        self.state_with_bound(gamma, eps, noise, ledger)
    }
}

/// Matrix-vector multiplication and norm estimation through a block
/// encoding `u` of `A`.
pub fn matvec_and_norm(
    u: &BlockEncoding,
    x: &Signal,
    variant: MatvecVariant,
    eps: f64,
    delta: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<MatvecOutput, QsvtError> {
    if u.ncols() != x.len() {
        return Err(QsvtError::DimensionMismatch(format!("{} columns, vector of length {}", u.ncols(), x.len())));
    }
    let x_norm = x.norm();
    if x_norm == 0.0 {
        return Err(QsvtError::InvalidArgument("input vector is zero".into()));
    }
    let problem = NormProblem {
        image: &u.matrix * x.vector(),
        x_norm,
        alpha: u.alpha,
        input_cost: QueryCounts::signal(1),
        source: EncodingSource::Fixed { cost: u.cost, epsilon: u.epsilon },
    };
    Ok(match variant {
        MatvecVariant::Additive => MatvecOutput::Estimate(problem.additive(eps, delta, noise, ledger)?),
        MatvecVariant::Relative => MatvecOutput::Estimate(problem.relative(eps, noise, ledger)?),
        MatvecVariant::StateWithBound { gamma } => {
            MatvecOutput::State(problem.state_with_bound(gamma, eps, noise, ledger)?)
        }
        MatvecVariant::State => MatvecOutput::State(problem.state_auto(eps, noise, ledger)?),
    })
}
