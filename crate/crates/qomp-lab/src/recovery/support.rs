use serde::{Deserialize, Serialize};

use super::RecoveryError;
use crate::classical::{brute_force_l0, gershgorin_gamma, mi_condition};
use crate::exec::Execution;
use crate::model::{mutual_incoherence, Dictionary, Signal, Support};
use crate::primitives::NoiseModel;
use crate::qomp::{qomp_run, Gamma, QompConfig, QompRun};
use crate::qsvt::{AccessMode, PolyKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportRecoveryOptions {
    /// Lower bound on `sigma_min` of every `k`-atom selection; defaults to
    /// `sqrt(1 - (k - 1) mu)`.
    pub gamma: Option<f64>,
    pub access: AccessMode,
    pub poly: PolyKind,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SupportRecoveryOptions {
    fn default() -> Self {
        Self { gamma: None, access: AccessMode::Oracular, poly: PolyKind::Sign, execution: Execution::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportRecovery {
    pub run: QompRun,
    pub mu: f64,
    pub gamma: f64,
    pub eps_i: f64,
    pub eps_f: f64,
    /// Whether the incoherence condition behind the recovery guarantee holds.
    pub guarantee_applicable: bool,
}

/// QOMP on the normalized state `|s>` with `eps_i = eta gamma eps / sqrt(k)`,
/// `eps_f = eps / 2`, at most `k` iterations and exit threshold `eps / 2`.
pub fn support_recovery(
    d: &Dictionary,
    s: &Signal,
    k: usize,
    eps: f64,
    eta: f64,
    noise: NoiseModel,
    options: SupportRecoveryOptions,
) -> Result<SupportRecovery, RecoveryError> {
    if k == 0 {
        return Err(RecoveryError::InvalidArgument("sparsity must be at least 1".into()));
    }
    if !(eps > 0.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(RecoveryError::InvalidArgument(format!("eps {eps} and eta {eta} out of range")));
    }
    let mu = mutual_incoherence(d, options.execution)?;
    let guarantee_applicable = mi_condition(mu, k, eta);
    let gamma = match options.gamma {
        Some(g) => g,
        None => {
            let g = gershgorin_gamma(k, mu);
            if g <= 0.0 {
                return Err(RecoveryError::InvalidArgument(
                    "coherence too large for a default gamma; supply one".into(),
                ));
            }
            g
        }
    };
    let eps_i = eta * gamma * eps / (k as f64).sqrt();
    let eps_f = eps / 2.0;
    let mut cfg = QompConfig::new(k, eps / 2.0, eps_i, eps_f, noise);
    cfg.gamma = Gamma::Fixed(gamma);
    cfg.access = options.access;
    cfg.poly = options.poly;
    cfg.execution = options.execution;
    let mut run = qomp_run(d, &s.normalized()?, &cfg)?;
    for b in run.budget.iter_mut().chain(run.iterations.iter_mut().map(|r| &mut r.selection_budget)) {
        b.eta = Some(eta);
    }
    Ok(SupportRecovery { run, mu, gamma, eps_i, eps_f, guarantee_applicable })
}

/// Whether every vector on fewer than `|optimal|` atoms misses `|s>` by more
/// than `eps` (checked exhaustively, including the empty support).
pub fn check_identifiability(d: &Dictionary, s: &Signal, optimal: &Support, eps: f64) -> Result<bool, RecoveryError> {
    let unit = s.normalized()?;
    if optimal.is_empty() {
        return Ok(true);
    }
    Ok(brute_force_l0(d, &unit, eps, optimal.len() - 1)?.is_none())
}
