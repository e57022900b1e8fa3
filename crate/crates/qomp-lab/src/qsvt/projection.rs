use serde::{Deserialize, Serialize};

use super::matvec::{EncodingSource, NormProblem};
use super::{
    antisym_step_poly, be_product, sign_poly_cached, sign_poly_degree, svt_apply, svt_cost, BlockEncoding,
    OddPolynomial, QsvtError,
};
use crate::model::linalg::{project_colspace, thin_svd};
use crate::model::Signal;
use crate::primitives::{EstimateOutcome, Noise, PreparedState, QueryCounts, QueryLedger};

/// The projector's polynomial is built at precision `eps / this`; with
/// `|P - 1| <= eps/4` on the kept singular values, `|P^2 - 1| <= eps`.
pub const PROJECTOR_PRECISION_CONSTANT: f64 = 4.0;

/// Polynomial used to flatten singular values in the projector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyKind {
    #[default]
    Sign,
    AntisymmetricStep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionVariant {
    /// State within `eps` of the normalized projection.
    State,
    /// Estimate of the projection norm within additive `eps`.
    AbsNorm,
    /// Estimate of the projection norm within relative `eps`.
    RelNorm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionOutput {
    State(PreparedState),
    Norm(EstimateOutcome),
}

impl ProjectionOutput {
    pub fn into_state(self) -> Option<PreparedState> {
        match self {
            ProjectionOutput::State(s) => Some(s),
            ProjectionOutput::Norm(_) => None,
        }
    }

    pub fn into_norm(self) -> Option<EstimateOutcome> {
        match self {
            ProjectionOutput::Norm(e) => Some(e),
            ProjectionOutput::State(_) => None,
        }
    }
}

fn flatten_width(alpha: f64, gamma: f64) -> f64 {
    (gamma / alpha).min(0.99)
}

fn poly_eps(eps: f64) -> f64 {
    eps.min(0.99) / PROJECTOR_PRECISION_CONSTANT
}

fn check(gamma: f64, eps: f64) -> Result<(), QsvtError> {
    if !(gamma > 0.0) {
        return Err(QsvtError::InvalidArgument(format!("gamma {gamma} must be positive")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(QsvtError::InvalidArgument(format!("projector precision {eps} outside (0, 1)")));
    }
    Ok(())
}

/// Polynomial degree and per-use queries of the projector encoding for an
/// encoding of normalization `alpha` and per-call cost `encoding`.
pub fn colspace_projector_cost(
    alpha: f64,
    gamma: f64,
    eps: f64,
    kind: PolyKind,
    encoding: QueryCounts,
) -> Result<(usize, QueryCounts), QsvtError> {
    check(gamma, eps)?;
    if alpha == 0.0 {
        return Err(QsvtError::ZeroAlpha);
    }
    let width = flatten_width(alpha, gamma);
    let degree = match kind {
        PolyKind::Sign => sign_poly_degree(width, poly_eps(eps))?,
        PolyKind::AntisymmetricStep => sign_poly_degree(width / 3.0, poly_eps(eps))?,
    };
    Ok((degree, svt_cost(degree, encoding) + svt_cost(degree, encoding.adjoint())))
}

/// Encoding of the orthogonal projector onto the column space of the encoded
/// matrix, as `P(A) P(A^dagger)` with `P` flat on singular values `>= gamma`.
pub fn colspace_projector_be(
    u: &BlockEncoding,
    gamma: f64,
    eps: f64,
    kind: PolyKind,
) -> Result<BlockEncoding, QsvtError> {
    check(gamma, eps)?;
    if u.is_degenerate() {
        return Err(QsvtError::ZeroAlpha);
    }
    let sigma = thin_svd(&u.matrix).sigma.last().copied().unwrap_or(0.0);
    if gamma > sigma + 1e-9 {
        return Err(QsvtError::GammaTooLarge { gamma, sigma });
    }
    let width = flatten_width(u.alpha, gamma);
    let poly: OddPolynomial = match kind {
        PolyKind::Sign => (*sign_poly_cached(width, poly_eps(eps))?).clone(),
        PolyKind::AntisymmetricStep => antisym_step_poly(width, poly_eps(eps))?,
    };
    let left = svt_apply(&poly, u)?;
    let right = svt_apply(&poly, &u.adjoint())?;
    let mut out = be_product(&left, &right)?;
    out.epsilon += eps;
    Ok(out)
}

/// Projection of `s` onto the column space of the encoded `D_Lambda`.
///
/// `AbsNorm` and `RelNorm` estimate `||Pi s||`; `State` returns a state close
/// to `Pi s / ||Pi s||`. All are simulated from the exact projection.
#[allow(clippy::too_many_arguments)]
pub fn column_space_projection(
    u: &BlockEncoding,
    s: &Signal,
    gamma: f64,
    eps: f64,
    variant: ProjectionVariant,
    kind: PolyKind,
    delta: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<ProjectionOutput, QsvtError> {
    if u.nrows() != s.len() {
        return Err(QsvtError::DimensionMismatch(format!("{} rows, signal of length {}", u.nrows(), s.len())));
    }
    if !(eps > 0.0) {
        return Err(QsvtError::InvalidArgument(format!("precision {eps} must be positive")));
    }
    let sigma = thin_svd(&u.matrix).sigma.last().copied().unwrap_or(0.0);
    if gamma > sigma + 1e-9 {
        return Err(QsvtError::GammaTooLarge { gamma, sigma });
    }
    let s_norm = s.norm();
    if s_norm == 0.0 {
        return Err(QsvtError::InvalidArgument("signal is zero".into()));
    }
    let image = project_colspace(&u.matrix, s.as_slice());
    let build = |precision: f64| -> Result<QueryCounts, QsvtError> {
        Ok(colspace_projector_cost(u.alpha, gamma, precision.min(0.99), kind, u.cost)?.1)
    };
    let problem = NormProblem {
        image,
        x_norm: s_norm,
        alpha: 1.0,
        input_cost: QueryCounts::signal(1),
        source: EncodingSource::Tunable(&build),
    };
    let scale = |e: EstimateOutcome| EstimateOutcome {
        value: e.value * s_norm,
        tolerance: e.tolerance * s_norm,
        deviation: e.deviation * s_norm,
        ..e
    };
    Ok(match variant {
        ProjectionVariant::AbsNorm => {
            ProjectionOutput::Norm(scale(problem.additive(eps / s_norm, delta, noise, ledger)?))
        }
        ProjectionVariant::RelNorm => ProjectionOutput::Norm(scale(problem.relative(eps, noise, ledger)?)),
        ProjectionVariant::State => {
            if problem.image.norm() < 1e-12 {
                return Err(QsvtError::ZeroProjection);
            }
            ProjectionOutput::State(problem.state_auto(eps, noise, ledger)?)
        }
    })
}
