use crate::qsvt::AccessMode;

/// Predicted queries of one iteration in model units (every oracle costs 1):
/// `sqrt(m) + ||s||^2 (sqrt(m)/eps_i + 1/eps_f)(1 + c)` with
/// `c = 2 sqrt(k) / gamma` for column access and `c = mu(D_Lambda) / gamma`
/// with data-structure access.
pub fn iteration_cost_model(
    k: usize,
    m: usize,
    s_norm: f64,
    eps_i: f64,
    eps_f: f64,
    gamma: f64,
    access: AccessMode,
    mu_support: Option<f64>,
) -> f64 {
    let root_m = (m as f64).sqrt();
    let factor = match access {
        AccessMode::Oracular => 2.0 * (k as f64).sqrt() / gamma,
        AccessMode::Qram => mu_support.unwrap_or((k as f64).sqrt()) / gamma,
    };
    root_m + s_norm * s_norm * (root_m / eps_i + 1.0 / eps_f) * (1.0 + factor)
}
