use std::collections::BTreeMap;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use serde::{Deserialize, Serialize};

use super::{support_recovery, RecoveryError, SupportRecoveryOptions};
use crate::classical::{count_subsets, erc_value, mi_condition};
use crate::model::{mutual_incoherence, CVector, Dictionary, Signal, Support, C64};
use crate::primitives::{hadamard_inner_product, Noise, NoiseModel, PreparedState, QueryCounts, QueryLedger, StateRef};
use crate::qsvt::{block_encode_oracular, qlss_solve};

/// `C` in the output-sparsity cap `C k max(1, ln k) max(1, ln(1/delta))`.
pub const SPARSITY_CONSTANT: f64 = 4.0;

/// Noise stream reserved for the tomography stage of the pipeline.
const TOMOGRAPHY_STREAM: u64 = 1 << 32;

/// Largest number of smaller supports the report will enumerate for the
/// identifiability certificate.
const IDENTIFIABILITY_LIMIT: u128 = 100_000;

/// Whether tomography verifies its sparsity promise on the true state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromiseCheck {
    #[default]
    Skip,
    Enforce,
}

/// Sparse vector as `(index, value)` pairs, ascending by index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseAmplitudes {
    pub len: usize,
    pub entries: Vec<(usize, C64)>,
}

impl SparseAmplitudes {
    pub fn to_dense(&self) -> CVector {
        let mut v = CVector::zeros(self.len);
        for &(j, a) in &self.entries {
            v[j] = a;
        }
        v
    }

    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|(j, _)| *j).collect()
    }
}

fn sparsity_cap(k: usize, delta: f64) -> usize {
    let k = k.max(1) as f64;
    (SPARSITY_CONSTANT * k * k.ln().max(1.0) * (1.0 / delta).ln().max(1.0)).ceil() as usize
}

/// State within `eps` of `D_L^+ s / ||D_L^+ s||`, scattered to length `m`.
pub fn coefficients_state(
    d: &Dictionary,
    support: &Support,
    s: &Signal,
    eps: f64,
    gamma: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<PreparedState, RecoveryError> {
    if support.is_empty() {
        return Err(RecoveryError::InvalidArgument("support is empty".into()));
    }
    support.check_range(d.m())?;
    let u = block_encode_oracular(&d.columns(support));
    let compact = qlss_solve(&u, s, gamma, eps, noise)?;
    ledger.charge(compact.circuit);
    let mut amplitudes = CVector::zeros(d.m());
    for (c, &j) in support.iter().enumerate() {
        amplitudes[j] = compact.amplitudes[c];
    }
    Ok(PreparedState { amplitudes, circuit: compact.circuit })
}

/// Sparse classical description of a state within `eps`, assuming at most `k`
/// amplitudes reach `eps sqrt(k / N)`.
///
/// Heavy entries are found by simulated computational-basis sampling (all
/// non-zero entries in exact mode); each kept entry is then estimated with
/// Hadamard tests against the basis state, real and imaginary parts to
/// `eps / (2 sqrt(k'))` for `k'` kept entries.
pub fn orthogonal_sparse_tomography(
    state: &PreparedState,
    k: usize,
    eps: f64,
    delta: f64,
    check: PromiseCheck,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<SparseAmplitudes, RecoveryError> {
    if k == 0 || !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(RecoveryError::InvalidArgument(format!("k {k}, eps {eps}, delta {delta} out of range")));
    }
    let alpha = &state.amplitudes;
    let len = alpha.len();
    if check == PromiseCheck::Enforce {
        let threshold = eps * (k as f64 / len as f64).sqrt();
        let count = alpha.iter().filter(|a| a.norm() >= threshold).count();
        if count > k {
            return Err(RecoveryError::ThresholdViolated { count, k });
        }
    }
    let cap = sparsity_cap(k, delta).min(len);
    let samples = (4.0 * k as f64 / eps * (k as f64 / delta).ln().max(1.0)).ceil() as u64;
    let mut kept: Vec<usize> = if noise.is_exact() {
        let mut nz: Vec<usize> = (0..len).filter(|&j| alpha[j].norm() > 0.0).collect();
        nz.sort_by(|&a, &b| alpha[b].norm().total_cmp(&alpha[a].norm()).then(a.cmp(&b)));
        nz
    } else {
        let weights: Vec<f64> = alpha.iter().map(|a| a.norm_sqr()).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| RecoveryError::InvalidArgument(e.to_string()))?;
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..samples {
            *counts.entry(dist.sample(noise.rng())).or_default() += 1;
        }
        let mut seen: Vec<(usize, u64)> = counts.into_iter().collect();
        seen.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        seen.into_iter().map(|(j, _)| j).collect()
    };
    kept.truncate(cap);
    kept.sort_unstable();
    ledger.charge_times(state.circuit, samples);
    let kept_len = kept.len().max(1) as f64;
    let entry_eps = eps / (2.0 * kept_len.sqrt());
    let mut basis = vec![C64::new(0.0, 0.0); len];
    let mut entries = Vec::with_capacity(kept.len());
    for j in kept {
        basis[j] = C64::new(1.0, 0.0);
        let e_j = StateRef { amplitudes: &basis, circuit: QueryCounts::aux(1) };
        let est = hadamard_inner_product(e_j, state.as_ref(), entry_eps, delta / (2.0 * kept_len), noise, ledger)?;
        basis[j] = C64::new(0.0, 0.0);
        entries.push((j, C64::new(est.re.value, est.im.value)));
    }
    Ok(SparseAmplitudes { len, entries })
}

/// Error split used by the coefficient tomography.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyBudget {
    pub eps: f64,
    /// Residual target for support recovery, `eps / 4`.
    pub eps_0: f64,
    /// Tomography precision, `eps / (6 kappa)`.
    pub eps_t: f64,
    /// Coefficient-state precision, `0.99 min(eps_t sqrt(K/N), eps_t / 2)`.
    pub eps_1: f64,
    pub kappa: f64,
}

impl TomographyBudget {
    pub fn new(eps: f64, kappa: f64, k: usize, len: usize) -> Self {
        let eps_t = eps / (6.0 * kappa);
        let eps_1 = 0.99 * (eps_t * (k as f64 / len as f64).sqrt()).min(eps_t / 2.0);
        Self { eps, eps_0: eps / 4.0, eps_t, eps_1, kappa }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub mi_condition: bool,
    /// Absent when the selected atoms are linearly dependent.
    pub erc_value: Option<f64>,
    /// Absent when the exhaustive check would be too large.
    pub identifiable: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub support: Support,
    /// Coefficients `y`, scaled so that `||D y|| = ||s||`.
    pub coefficients: SparseAmplitudes,
    /// `|| |s> - D y / ||D y|| ||`.
    pub reconstruction_error: f64,
    pub ledger: QueryLedger,
    pub certificates: Certificates,
    pub budget: TomographyBudget,
}

/// Classical description of the coefficients of `s` on `support`, built from
/// a coefficient state and sparse tomography.
#[allow(clippy::too_many_arguments)]
pub fn sparse_coefficient_tomography(
    d: &Dictionary,
    support: &Support,
    s: &Signal,
    eps: f64,
    delta: f64,
    gamma: Option<f64>,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<TomographyReport, RecoveryError> {
    if support.is_empty() {
        return Err(RecoveryError::InvalidArgument("support is empty".into()));
    }
    let kappa = d.condition_number(support);
    if !kappa.is_finite() {
        return Err(RecoveryError::InvalidArgument("selected atoms are linearly dependent".into()));
    }
    let gamma = gamma.unwrap_or_else(|| d.sigma_min(support));
    let k = support.len();
    let budget = TomographyBudget::new(eps, kappa, k, d.m());
    let state = coefficients_state(d, support, s, budget.eps_1, gamma, noise, ledger)?;
    let alpha = orthogonal_sparse_tomography(&state, k, budget.eps_t, delta, PromiseCheck::Skip, noise, ledger)?;
    let direction = alpha.to_dense();
    let image = d.matrix() * &direction;
    let image_norm = image.norm();
    let s_unit = s.unit()?;
    let (reconstruction_error, scale) = if image_norm > 0.0 {
        ((s_unit - image.unscale(image_norm)).norm(), s.norm() / image_norm)
    } else {
        (1.0, 0.0)
    };
    let coefficients =
        SparseAmplitudes { len: alpha.len, entries: alpha.entries.iter().map(|&(j, a)| (j, a * scale)).collect() };
    let mu = mutual_incoherence(d, crate::exec::Execution::default())?;
    let identifiable = if count_subsets(d.m(), k - 1) <= IDENTIFIABILITY_LIMIT {
        Some(super::check_identifiability(d, s, support, eps)?)
    } else {
        None
    };
    let certificates =
        Certificates { mi_condition: mi_condition(mu, k, 0.0), erc_value: erc_value(d, support).ok(), identifiable };
    Ok(TomographyReport {
        support: support.clone(),
        coefficients,
        reconstruction_error,
        ledger: ledger.clone(),
        certificates,
        budget,
    })
}

/// Support recovery at residual `eps / 4` followed by coefficient tomography
/// at `eps`.
#[allow(clippy::too_many_arguments)]
pub fn tomography_pipeline(
    d: &Dictionary,
    s: &Signal,
    k: usize,
    eps: f64,
    eta: f64,
    delta: f64,
    noise: NoiseModel,
    options: SupportRecoveryOptions,
) -> Result<TomographyReport, RecoveryError> {
    let recovered = support_recovery(d, s, k, eps / 4.0, eta, noise, options)?;
    let mut ledger = recovered.run.ledger.clone();
    let mut stream = noise.stream(TOMOGRAPHY_STREAM);
    sparse_coefficient_tomography(d, &recovered.run.support, s, eps, delta, None, &mut stream, &mut ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CMatrix;

    fn identity(n: usize) -> Dictionary {
        Dictionary::new(CMatrix::identity(n, n)).unwrap()
    }

    #[test]
    fn budget_formula() {
        let b = TomographyBudget::new(0.12, 1.0, 2, 8);
        assert!((b.eps_0 - 0.03).abs() < 1e-15);
        assert!((b.eps_t - 0.02).abs() < 1e-15);
        assert!(b.eps_1 < 0.01);
    }

    #[test]
    fn exact_sparse_state_is_recovered_exactly() {
        let mut amplitudes = CVector::zeros(8);
        amplitudes[1] = C64::new(0.6, 0.0);
        amplitudes[5] = C64::new(0.0, 0.8);
        let state = PreparedState { amplitudes: amplitudes.clone(), circuit: QueryCounts::signal(1) };
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let out =
            orthogonal_sparse_tomography(&state, 2, 0.1, 0.1, PromiseCheck::Enforce, &mut noise, &mut ledger).unwrap();
        assert_eq!(out.to_dense(), amplitudes);
        assert!(ledger.totals.u_s > 0);
    }

    #[test]
    fn promise_violation() {
        let state =
            PreparedState { amplitudes: CVector::from_element(16, C64::new(0.25, 0.0)), circuit: QueryCounts::ZERO };
        let mut noise = NoiseModel::exact().stream(0);
        let mut ledger = QueryLedger::new();
        let r = orthogonal_sparse_tomography(&state, 2, 0.1, 0.1, PromiseCheck::Enforce, &mut noise, &mut ledger);
        assert!(matches!(r, Err(RecoveryError::ThresholdViolated { count: 16, k: 2 })));
    }

    #[test]
    fn orthonormal_coefficients() {
        let d = identity(6);
        let s = Signal::from_real(&[0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let support = Support::from_indices([1, 3]).unwrap();
        let mut noise = NoiseModel::adversarial(5).stream(0);
        let mut ledger = QueryLedger::new();
        let r = sparse_coefficient_tomography(&d, &support, &s, 0.1, 0.1, None, &mut noise, &mut ledger).unwrap();
        assert!(r.reconstruction_error <= 0.1);
        let y = r.coefficients.to_dense();
        assert!((y[1].re - 1.0).abs() <= 0.1 && (y[3].re - 1.0).abs() <= 0.1);
        assert_eq!(r.certificates.identifiable, Some(true));
    }
}
