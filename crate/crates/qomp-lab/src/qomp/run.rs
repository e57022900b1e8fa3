use serde::{Deserialize, Serialize};

use super::{residual_norm_estimate, select_atom, IterationContext, PrecisionBudget, QompError, Selection};
use crate::classical::{RecoveryResult, Status};
use crate::exec::Execution;
use crate::model::{Dictionary, Signal, Support};
use crate::primitives::{NoiseModel, QueryCounts, QueryLedger};
use crate::qsvt::{AccessMode, PolyKind, QsvtError};

/// Lower bound on the singular values of the selected atoms used by the
/// projector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    /// The smallest non-zero singular value of the current selection.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QompConfig {
    /// Maximum number of atoms `L`.
    pub max_atoms: usize,
    /// Exit threshold on the residual estimate.
    pub epsilon: f64,
    /// Score precision.
    pub eps_i: f64,
    /// Residual-estimate precision.
    pub eps_f: f64,
    pub gamma: Gamma,
    pub access: AccessMode,
    pub poly: PolyKind,
    pub noise: NoiseModel,
    #[serde(skip)]
    pub execution: Execution,
}

impl QompConfig {
    pub fn new(max_atoms: usize, epsilon: f64, eps_i: f64, eps_f: f64, noise: NoiseModel) -> Self {
        Self {
            max_atoms,
            epsilon,
            eps_i,
            eps_f,
            gamma: Gamma::Auto,
            access: AccessMode::Oracular,
            poly: PolyKind::Sign,
            noise,
            execution: Execution::default(),
        }
    }

    /// Per-iteration failure target `1 / (6 L)`.
    pub fn delta_iter(&self) -> f64 {
        1.0 / (6.0 * self.max_atoms as f64)
    }

    fn resolve_gamma(&self, d: &Dictionary, support: &Support) -> f64 {
        match self.gamma {
            Gamma::Fixed(g) => g,
            Gamma::Auto if support.is_empty() => 1.0,
            Gamma::Auto => d.sigma_min_nonzero(support),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub selection: Selection,
    pub gamma: f64,
    /// `||phi||` estimate used by the scores.
    pub phi_estimate: Option<f64>,
    pub residual_estimate: f64,
    pub residual_true: f64,
    pub selection_budget: PrecisionBudget,
    pub exit_budget: Option<PrecisionBudget>,
    pub queries: QueryCounts,
}

/// Everything a run produces; serializes to the run-record JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QompRun {
    pub support: Support,
    pub residual_norms: Vec<f64>,
    pub ledger: QueryLedger,
    pub budget: Vec<PrecisionBudget>,
    pub status: Status,
    pub seed: u64,
    pub iterations: Vec<IterationRecord>,
}

impl QompRun {
    pub fn result(&self) -> RecoveryResult {
        RecoveryResult {
            support: self.support.clone(),
            coefficients: None,
            residual_norms: self.residual_norms.clone(),
            iterations: self.support.len(),
            status: self.status,
        }
    }
}

fn non_terminating<T>(r: Result<T, QompError>) -> Result<Option<T>, QompError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(QompError::Qsvt(QsvtError::NonTerminating)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs QOMP until the residual estimate drops to `epsilon` or `max_atoms`
/// atoms are selected.
///
/// Iteration `k` draws from noise streams `2k` (selection) and `2k + 1`
/// (exit test), so each estimate depends only on the support it is computed
/// for and the seed.
pub fn qomp_run(d: &Dictionary, s: &Signal, cfg: &QompConfig) -> Result<QompRun, QompError> {
    if cfg.max_atoms == 0 {
        return Err(QompError::InvalidArgument("at least one atom must be allowed".into()));
    }
    if !(cfg.epsilon > 0.0) {
        return Err(QompError::InvalidArgument(format!("threshold {} must be positive", cfg.epsilon)));
    }
    if s.len() != d.n() {
        return Err(QompError::InvalidArgument(format!("signal length {} differs from {}", s.len(), d.n())));
    }
    if let Gamma::Fixed(g) = cfg.gamma {
        if !(g > 0.0) {
            return Err(QompError::InvalidArgument(format!("gamma {g} must be positive")));
        }
    }
    let mut support = Support::new();
    let mut ledger = QueryLedger::new();
    let mut residual = s.norm();
    let mut residual_norms = Vec::new();
    let mut records = Vec::new();
    let status = loop {
        if residual <= cfg.epsilon {
            break Status::Converged;
        }
        if support.len() == cfg.max_atoms {
            break Status::SparsityExceeded;
        }
        if support.len() == d.m() {
            break Status::MaxIterationsInternal;
        }
        let k = support.len() as u64;
        let gamma = cfg.resolve_gamma(d, &support);
        let mut noise = cfg.noise.stream(2 * k);
        let Some(ctx) =
            non_terminating(IterationContext::prepare(d, s, &support, cfg, gamma, &mut noise, &mut ledger))?
        else {
            break Status::NonTerminating;
        };
        let Some(selection) = non_terminating(select_atom(&ctx, cfg, &mut noise, &mut ledger))? else {
            break Status::NonTerminating;
        };
        let selection_budget = *ctx.budget();
        let phi_estimate = ctx.phi_estimate();
        drop(ctx);
        support.push(selection.atom)?;
        let gamma_exit = cfg.resolve_gamma(d, &support);
        let mut exit_noise = cfg.noise.stream(2 * k + 1);
        let Some(est) =
            non_terminating(residual_norm_estimate(d, s, &support, cfg, gamma_exit, &mut exit_noise, &mut ledger))?
        else {
            break Status::NonTerminating;
        };
        residual = est.value;
        residual_norms.push(residual);
        ledger.end_iteration();
        records.push(IterationRecord {
            selection,
            gamma,
            phi_estimate,
            residual_estimate: est.value,
            residual_true: est.truth,
            selection_budget,
            exit_budget: est.budget,
            queries: *ledger.per_iteration.last().expect("iteration recorded"),
        });
    };
    Ok(QompRun {
        budget: records.iter().map(|r| r.selection_budget).collect(),
        support,
        residual_norms,
        ledger,
        status,
        seed: cfg.noise.seed,
        iterations: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::omp_projection;
    use crate::model::{CMatrix, C64};

    fn small_dictionary() -> Dictionary {
        Dictionary::new(CMatrix::from_fn(4, 6, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 3.0 } else { 0.0 }, 0.1 * (i as f64 - j as f64))
        }))
        .unwrap()
    }

    #[test]
    fn one_sparse_signal_selects_its_atom() {
        let d = Dictionary::new(CMatrix::identity(5, 5)).unwrap();
        let s = Signal::from_real(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        let cfg = QompConfig::new(3, 0.1, 0.05, 0.05, NoiseModel::exact());
        let run = qomp_run(&d, &s, &cfg).unwrap();
        assert_eq!(run.support.as_slice(), &[2]);
        assert_eq!(run.status, Status::Converged);
        assert_eq!(run.ledger.per_iteration.len(), 1);
    }

    #[test]
    fn exact_mode_matches_classical_projection_form() {
        let d = small_dictionary();
        let s = Signal::from_slice(&[C64::new(1.0, 0.2), C64::new(-0.5, 0.0), C64::new(0.3, -0.4), C64::new(2.0, 0.0)]);
        let cfg = QompConfig::new(3, 1e-6, 0.01, 0.01, NoiseModel::exact());
        let run = qomp_run(&d, &s, &cfg).unwrap();
        let classical = omp_projection(&d, &s, 3, 1e-6).unwrap();
        assert_eq!(run.support, classical.support);
        assert_eq!(run.status, classical.status);
        for (a, b) in run.residual_norms.iter().zip(&classical.residual_norms) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn selections_are_reproducible() {
        let d = small_dictionary();
        let s = Signal::from_real(&[1.0, 0.5, -0.3, 0.8]);
        let cfg = QompConfig::new(2, 1e-3, 0.05, 0.05, NoiseModel::stochastic(11));
        assert_eq!(qomp_run(&d, &s, &cfg).unwrap(), qomp_run(&d, &s, &cfg).unwrap());
    }

    #[test]
    fn fixed_gamma_above_the_smallest_singular_value_is_an_error() {
        let d = small_dictionary();
        let s = Signal::from_real(&[1.0, 0.5, -0.3, 0.8]);
        let mut cfg = QompConfig::new(3, 1e-6, 0.05, 0.05, NoiseModel::exact());
        cfg.gamma = Gamma::Fixed(5.0);
        assert!(matches!(qomp_run(&d, &s, &cfg), Err(QompError::Qsvt(QsvtError::GammaTooLarge { .. }))));
    }
}
