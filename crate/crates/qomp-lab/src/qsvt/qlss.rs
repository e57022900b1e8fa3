use super::{log_factor, BlockEncoding, QsvtError};
use crate::model::linalg::{pinv, thin_svd};
use crate::model::Signal;
use crate::primitives::{perturb_state, Noise, PreparedState, QueryCounts};

/// Per-preparation queries of the linear-system solver:
/// `(alpha/gamma) log(alpha/gamma) (T_A log(alpha/(gamma delta)) + T_b)`.
pub fn qlss_cost(alpha: f64, gamma: f64, delta: f64, encoding: QueryCounts, input: QueryCounts) -> QueryCounts {
    let kappa = alpha / gamma;
    let outer = kappa * log_factor(kappa);
    let a_calls = (outer * log_factor(alpha / (gamma * delta))).ceil() as u64;
    let b_calls = outer.ceil() as u64;
    encoding.scaled(a_calls) + input.scaled(b_calls)
}

/// State within `delta` of `A^+ b / ||A^+ b||` for the encoded `A`, whose
/// non-zero singular values must lie in `[gamma, alpha]`.
pub fn qlss_solve(
    u: &BlockEncoding,
    b: &Signal,
    gamma: f64,
    delta: f64,
    noise: &mut Noise,
) -> Result<PreparedState, QsvtError> {
    if u.nrows() != b.len() {
        return Err(QsvtError::DimensionMismatch(format!("{} rows, vector of length {}", u.nrows(), b.len())));
    }
    if !(gamma > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(QsvtError::InvalidArgument(format!("gamma {gamma} and delta {delta} out of range")));
    }
    if u.is_degenerate() {
        return Err(QsvtError::ZeroAlpha);
    }
    let sigma = thin_svd(&u.matrix).sigma.last().copied().unwrap_or(0.0);
    if sigma < gamma - 1e-9 {
        return Err(QsvtError::IllConditioned { gamma, sigma });
    }
    let logs = log_factor(u.alpha / (gamma * delta));
    let need = gamma.powi(3) * delta / (u.alpha * u.alpha * logs * logs);
    if u.epsilon > need {
        return Err(QsvtError::PrecisionInsufficient { have: u.epsilon, need });
    }
    let solution = pinv(&u.matrix) * b.vector();
    if solution.norm() < 1e-12 {
        return Err(QsvtError::ZeroProjection);
    }
    let circuit = qlss_cost(u.alpha, gamma, delta, u.cost, QueryCounts::signal(1));
    Ok(PreparedState { amplitudes: perturb_state(&solution.normalize(), delta, noise), circuit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CMatrix, C64};
    use crate::primitives::NoiseModel;
    use crate::qsvt::block_encode_oracular;

    #[test]
    fn orthonormal_system() {
        let a = CMatrix::from_fn(3, 2, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        let u = block_encode_oracular(&a);
        let b = Signal::from_real(&[0.0, 2.0, 1.0]);
        let mut noise = NoiseModel::adversarial(7).stream(0);
        let x = qlss_solve(&u, &b, 1.0, 0.05, &mut noise).unwrap();
        assert!((x.amplitudes[1].norm() - 1.0).abs() <= 0.05);
        assert!(x.circuit.u_d > 0 && x.circuit.u_s > 0);
    }

    #[test]
    fn gamma_above_sigma() {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(if i == j { 0.5 } else { 0.0 }, 0.0));
        let u = block_encode_oracular(&a);
        let mut noise = NoiseModel::exact().stream(0);
        let r = qlss_solve(&u, &Signal::from_real(&[1.0, 1.0]), 0.9, 0.1, &mut noise);
        assert!(matches!(r, Err(QsvtError::IllConditioned { .. })));
    }
}
