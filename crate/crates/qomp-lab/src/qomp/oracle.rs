use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PrecisionBudget, QompConfig, QompError};
use crate::exec::map_indexed;
use crate::model::{CVector, Dictionary, Signal, Support};
use crate::primitives::{
    find_max_over_estimates, hadamard_inner_product, weighted_distance_estimate, FailureHandling, Noise, NoiseModel,
    PreparedState, QueryCounts, QueryLedger, StateRef,
};
use crate::qsvt::{column_space_projection, encode_support, ProjectionVariant, QsvtError};

/// Everything the score oracle needs for one iteration, computed once: the
/// budget, and the estimates of `||phi||` and `|phi>` for the current support.
pub struct IterationContext<'a> {
    d: &'a Dictionary,
    support: &'a Support,
    s_unit: CVector,
    s_norm: f64,
    budget: PrecisionBudget,
    phi_estimate: Option<f64>,
    phi: Option<(f64, PreparedState)>,
    delta_iter: f64,
    delta_estimate: f64,
}

/// Estimate of `||phi||` with the threshold below which the projection is
/// treated as zero.
fn projection_norm(
    d: &Dictionary,
    s: &Signal,
    support: &Support,
    cfg: &QompConfig,
    gamma: f64,
    eps: f64,
    delta: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<(f64, bool), QompError> {
    let u = encode_support(d, support, cfg.access)?;
    let est = column_space_projection(&u, s, gamma, eps, ProjectionVariant::AbsNorm, cfg.poly, delta, noise, ledger)?
        .into_norm()
        .expect("norm variant");
    let floor = if noise.is_exact() { 1e-12 * s.norm() } else { eps };
    Ok((est.value, est.value > floor))
}

/// State `|phi>` within `eps`, or `None` when the projection vanishes.
fn projection_state(
    d: &Dictionary,
    s: &Signal,
    support: &Support,
    cfg: &QompConfig,
    gamma: f64,
    eps: f64,
    delta: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<Option<PreparedState>, QompError> {
    let u = encode_support(d, support, cfg.access)?;
    match column_space_projection(&u, s, gamma, eps, ProjectionVariant::State, cfg.poly, delta, noise, ledger) {
        Ok(out) => Ok(out.into_state()),
        Err(QsvtError::ZeroProjection) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

impl<'a> IterationContext<'a> {
    /// Estimates `||phi||`, derives the budget and prepares `|phi>` for the
    /// support. `gamma` is ignored for an empty support.
    pub fn prepare(
        d: &'a Dictionary,
        s: &Signal,
        support: &'a Support,
        cfg: &QompConfig,
        gamma: f64,
        noise: &mut Noise,
        ledger: &mut QueryLedger,
    ) -> Result<Self, QompError> {
        let s_norm = s.norm();
        let budget_norm = s_norm.max(1.0);
        let delta_iter = cfg.delta_iter();
        let delta_estimate = delta_iter / (8.0 * d.m() as f64);
        let mut ctx = IterationContext {
            d,
            support,
            s_unit: s.unit()?,
            s_norm,
            budget: PrecisionBudget::first_iteration(cfg.eps_i, cfg.eps_f, budget_norm)?,
            phi_estimate: None,
            phi: None,
            delta_iter,
            delta_estimate,
        };
        if support.is_empty() {
            return Ok(ctx);
        }
        let eps_norm = cfg.eps_i / (72.0 * budget_norm);
        let (phi_norm, keep) = projection_norm(d, s, support, cfg, gamma, eps_norm, delta_estimate, noise, ledger)?;
        ctx.phi_estimate = Some(phi_norm);
        ctx.budget = PrecisionBudget::derive(cfg.eps_i, cfg.eps_f, budget_norm, keep.then_some(phi_norm))?;
        if let Some(eps_state) = ctx.budget.eps_1phi {
            let state = projection_state(d, s, support, cfg, gamma, eps_state, delta_estimate, noise, ledger)?;
            ctx.phi = state.map(|st| (phi_norm, st));
            if ctx.phi.is_none() {
                ctx.budget = PrecisionBudget::derive(cfg.eps_i, cfg.eps_f, budget_norm, None)?;
            }
        }
        ctx.budget.gamma = Some(gamma);
        Ok(ctx)
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    /// The `||phi||` estimate, even when it fell below the drop threshold.
    pub fn phi_estimate(&self) -> Option<f64> {
        self.phi_estimate
    }

    /// Whether the scores include the projection terms.
    pub fn uses_phi(&self) -> bool {
        self.phi.is_some()
    }
}

/// Score `z_j = |<d_j| (||s|| |s> - ||phi|| |phi>)|^2`, assembled from
/// Hadamard-test estimates of `<d_j|s>` and `<d_j|phi>`.
pub fn atom_oracle(
    ctx: &IterationContext<'_>,
    j: usize,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<f64, QompError> {
    if ctx.support.contains(j) {
        return Err(QompError::AtomAlreadySelected(j));
    }
    let atom = StateRef { amplitudes: ctx.d.atom(j), circuit: QueryCounts::dictionary(1) };
    let signal = StateRef { amplitudes: ctx.s_unit.as_slice(), circuit: QueryCounts::signal(1) };
    let b = &ctx.budget;
    let z1 = hadamard_inner_product(atom, signal, b.eps_1re, ctx.delta_estimate, noise, ledger)?;
    let mut re = ctx.s_norm * z1.re.value;
    let mut im = ctx.s_norm * z1.im.value;
    if let (Some((phi_norm, phi)), Some(eps_2)) = (&ctx.phi, b.eps_2re) {
        let z2 = hadamard_inner_product(atom, phi.as_ref(), eps_2, ctx.delta_estimate, noise, ledger)?;
        re -= phi_norm * z2.re.value;
        im -= phi_norm * z2.im.value;
    }
    Ok(re * re + im * im)
}

/// Atom chosen by one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub atom: usize,
    pub score: f64,
    /// Whether the simulated max-finding failed (returned a random atom).
    pub failed: bool,
}

fn select_once(
    ctx: &IterationContext<'_>,
    candidates: &[usize],
    cfg: &QompConfig,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<Selection, QompError> {
    let scored: Vec<Result<(f64, QueryCounts), QompError>> = if noise.is_exact() {
        map_indexed(cfg.execution, candidates.len(), |i| {
            let mut scratch = QueryLedger::new();
            let mut quiet = NoiseModel::exact().stream(0);
            atom_oracle(ctx, candidates[i], &mut quiet, &mut scratch).map(|z| (z, scratch.totals))
        })
    } else {
        candidates
            .iter()
            .map(|&j| {
                let mut scratch = QueryLedger::new();
                atom_oracle(ctx, j, noise, &mut scratch).map(|z| (z, scratch.totals))
            })
            .collect()
    };
    let mut values = Vec::with_capacity(candidates.len());
    let mut per_query = QueryCounts::ZERO;
    for r in scored {
        let (z, cost) = r?;
        values.push(z);
        per_query = per_query.max(cost);
    }
    let out = find_max_over_estimates(&values, per_query, ctx.delta_iter, QueryCounts::aux(1), noise, ledger)?;
    Ok(Selection { atom: candidates[out.index], score: out.value, failed: out.failed })
}

/// Approximate argmax of the scores over the unselected atoms. With
/// amplified failure handling the search is repeated and the most frequent
/// atom wins (smallest index on ties).
pub fn select_atom(
    ctx: &IterationContext<'_>,
    cfg: &QompConfig,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<Selection, QompError> {
    let candidates = ctx.support.complement(ctx.d.m());
    if candidates.is_empty() {
        return Err(QompError::EmptyComplement);
    }
    if noise.model().failure_handling == FailureHandling::Propagate {
        return select_once(ctx, &candidates, cfg, noise, ledger);
    }
    let mut runs = Vec::new();
    for _ in 0..noise.reps(ctx.delta_iter) {
        runs.push(select_once(ctx, &candidates, cfg, noise, ledger)?);
    }
    let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &runs {
        *votes.entry(r.atom).or_default() += 1;
    }
    let top = votes.values().copied().max().unwrap_or(0);
    let winner = votes.iter().find(|(_, c)| **c == top).map(|(a, _)| *a).expect("at least one run");
    let failed = runs.iter().filter(|r| r.atom == winner).all(|r| r.failed);
    let score = runs.iter().find(|r| r.atom == winner).map_or(f64::NAN, |r| r.score);
    Ok(Selection { atom: winner, score, failed })
}

/// Outcome of the exit test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEstimate {
    pub value: f64,
    /// `||phi||` estimate for the support, if one was needed.
    pub phi_estimate: Option<f64>,
    /// `||s - phi||` from the exact projection, for diagnostics.
    pub truth: f64,
    pub budget: Option<PrecisionBudget>,
}

/// Estimate of `||s - D_L D_L^+ s||` within `eps_f` as the weighted distance
/// between `||s|| |s>` and `||phi|| |phi>`. An empty support gives `||s||`.
pub fn residual_norm_estimate(
    d: &Dictionary,
    s: &Signal,
    support: &Support,
    cfg: &QompConfig,
    gamma: f64,
    noise: &mut Noise,
    ledger: &mut QueryLedger,
) -> Result<ResidualEstimate, QompError> {
    let s_norm = s.norm();
    if support.is_empty() {
        return Ok(ResidualEstimate { value: s_norm, phi_estimate: None, truth: s_norm, budget: None });
    }
    let (phi_exact, _) = d.project(support, s.as_slice());
    let truth = (s.vector() - &phi_exact).norm();
    let budget_norm = s_norm.max(1.0);
    let delta = cfg.delta_iter() / 8.0;
    let eps_norm = cfg.eps_f / 3.0;
    let (phi_norm, keep) = projection_norm(d, s, support, cfg, gamma, eps_norm, delta, noise, ledger)?;
    let mut budget = PrecisionBudget::derive(cfg.eps_i, cfg.eps_f, budget_norm, keep.then_some(phi_norm))?;
    budget.gamma = Some(gamma);
    let dropped = ResidualEstimate { value: s_norm, phi_estimate: Some(phi_norm), truth, budget: Some(budget) };
    let Some(eps_state) = budget.eps_2phi else {
        return Ok(dropped);
    };
    let Some(phi) = projection_state(d, s, support, cfg, gamma, eps_state, delta, noise, ledger)? else {
        return Ok(dropped);
    };
    let s_unit = s.unit()?;
    let signal = StateRef { amplitudes: s_unit.as_slice(), circuit: QueryCounts::signal(1) };
    let est = weighted_distance_estimate(s_norm, signal, phi_norm, phi.as_ref(), budget.eps_w, delta, noise, ledger)?;
    Ok(ResidualEstimate { value: est.value, phi_estimate: Some(phi_norm), truth, budget: Some(budget) })
}
