use serde::{Deserialize, Serialize};

use super::QompError;

/// Tolerances for every estimator inside one iteration, derived from the
/// score precision `eps_i` and the exit-test precision `eps_f`.
///
/// Entries involving the projection `phi` are `None` when its norm estimate
/// is zero and those terms are dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub eps_i: f64,
    pub eps_f: f64,
    /// `<d_j|s>`, real and imaginary parts.
    pub eps_1re: f64,
    pub eps_1im: f64,
    /// `<d_j|phi>`, real and imaginary parts.
    pub eps_2re: Option<f64>,
    pub eps_2im: Option<f64>,
    /// State `|phi>` used by the scores.
    pub eps_1phi: Option<f64>,
    /// `||phi||` used by the scores.
    pub eps_1nphi: f64,
    /// State `|phi>` used by the exit test.
    pub eps_2phi: Option<f64>,
    /// `||phi||` used by the exit test.
    pub eps_2nphi: f64,
    /// Weighted distance in the exit test.
    pub eps_w: f64,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
}

impl PrecisionBudget {
    /// Sub-tolerances at their maximal admissible values. `phi_norm` is the
    /// estimate of `||phi||` the tolerances are scaled by.
    pub fn derive(eps_i: f64, eps_f: f64, s_norm: f64, phi_norm: Option<f64>) -> Result<Self, QompError> {
        if !(eps_i > 0.0 && eps_f > 0.0) {
            return Err(QompError::InvalidArgument(format!("precisions must be positive (got {eps_i}, {eps_f})")));
        }
        if !(s_norm >= 1.0) {
            return Err(QompError::NormTooSmall(s_norm));
        }
        let phi = phi_norm.filter(|p| *p > 0.0);
        let eps_1re = eps_i / (48.0 * s_norm * s_norm);
        let eps_2re = phi.map(|p| eps_i / (48.0 * s_norm * p));
        Ok(Self {
            eps_i,
            eps_f,
            eps_1re,
            eps_1im: eps_1re,
            eps_2re,
            eps_2im: eps_2re,
            eps_1phi: phi.map(|p| eps_i / (96.0 * s_norm * p)),
            eps_1nphi: eps_i / (72.0 * s_norm),
            eps_2phi: phi.map(|p| eps_f / (3.0 * p)),
            eps_2nphi: eps_f / 3.0,
            eps_w: eps_f / 3.0,
            eta: None,
            gamma: None,
        })
    }

    /// With an empty support only `<d_j|s>` is estimated, and
    /// `eps_1re <= eps_i / (8 ||s||^2)` suffices.
    pub fn first_iteration(eps_i: f64, eps_f: f64, s_norm: f64) -> Result<Self, QompError> {
        let mut b = Self::derive(eps_i, eps_f, s_norm, None)?;
        b.eps_1re = eps_i / (8.0 * s_norm * s_norm);
        b.eps_1im = b.eps_1re;
        Ok(b)
    }

    pub fn uses_phi(&self) -> bool {
        self.eps_2re.is_some()
    }
}
