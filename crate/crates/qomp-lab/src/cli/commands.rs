use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;

use super::config::{
    read_config, BenchCommand, EstimateMuCommand, GenerateSpec, Instance, OmpCommand, OmpVariant, QompCommand,
    ReduceX3cCommand, Solver, SweepCommand, TomographyCommand,
};
use super::table::Row;
use crate::classical::{omp, omp_projection, RecoveryResult, Status};
use crate::exec::{map_indexed, Execution};
use crate::hardness::{
    planted_cover_instance, random_instance, reduce_x3c, reduced_residual, reduced_sparse_solution, verify_reduction,
    x3c_bitmask, x3c_brute, X3cInstance, TRIPLE_GUARD,
};
use crate::instances::rng;
use crate::model::{mutual_incoherence, MatrixRecord, Signal, Support};
use crate::primitives::{NoiseModel, QueryLedger};
use crate::qomp::{iteration_cost_model, qomp_run, Gamma, QompConfig, QompRun};
use crate::recovery::{
    estimate_mutual_incoherence_q, support_recovery, tomography_pipeline, MuEstimate, SupportRecovery,
    SupportRecoveryOptions, TomographyReport,
};

/// What a command produced: a JSON document, CSV rows, and the exit code.
pub struct Outcome {
    pub json: Option<String>,
    pub rows: Vec<Row>,
    pub exit: i32,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn status_exit(status: Status) -> i32 {
    if status == Status::Converged {
        0
    } else {
        2
    }
}

fn subset_of(support: &Support, planted: Option<&Support>) -> Option<bool> {
    planted.map(|p| support.is_subset_of(p))
}

fn final_residual(result: &RecoveryResult, s_norm: f64) -> f64 {
    result.residual_norms.last().copied().unwrap_or(s_norm)
}

fn default_atoms(inst: &Instance) -> usize {
    inst.k.unwrap_or_else(|| inst.dictionary.n().min(inst.dictionary.m()))
}

#[derive(Serialize)]
struct OmpRecord<'a> {
    command: &'static str,
    variant: OmpVariant,
    seed: Option<u64>,
    n: usize,
    m: usize,
    max_atoms: usize,
    epsilon: f64,
    status: Status,
    support: &'a [usize],
    residual_norms: &'a [f64],
    coefficients: Option<MatrixRecord>,
    planted_support: Option<Vec<usize>>,
}

pub fn omp_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, base): (OmpCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed);
    let inst = cfg.instance.load(&base, seed.unwrap_or(0))?;
    let s = inst.signal()?;
    let max_atoms = cfg.max_atoms.unwrap_or_else(|| default_atoms(&inst));
    let d = &inst.dictionary;
    let result = match cfg.variant {
        OmpVariant::LeastSquares => omp(d, s, max_atoms, cfg.epsilon)?,
        OmpVariant::Projection => omp_projection(d, s, max_atoms, cfg.epsilon)?,
    };
    let record = OmpRecord {
        command: "omp",
        variant: cfg.variant,
        seed,
        n: d.n(),
        m: d.m(),
        max_atoms,
        epsilon: cfg.epsilon,
        status: result.status,
        support: result.support.as_slice(),
        residual_norms: &result.residual_norms,
        coefficients: result.coefficients.as_ref().map(|c| MatrixRecord::from_signal(&Signal::new(c.clone()))),
        planted_support: inst.planted.as_ref().map(Support::sorted),
    };
    let row = Row {
        seed: seed.unwrap_or(0),
        n: d.n(),
        m: d.m(),
        k: Some(max_atoms),
        epsilon: Some(cfg.epsilon),
        status: result.status.as_str().into(),
        error: Some(final_residual(&result, s.norm())),
        iterations: Some(result.iterations),
        support_ok: subset_of(&result.support, inst.planted.as_ref()),
        ..Row::default()
    };
    Ok(Outcome { json: Some(to_json(&record)?), rows: vec![row], exit: status_exit(result.status) })
}

#[derive(Serialize)]
#[serde(untagged)]
enum QompBody {
    Run(QompRun),
    Recovery(SupportRecovery),
}

#[derive(Serialize)]
struct QompRecord {
    command: &'static str,
    seed: Option<u64>,
    n: usize,
    m: usize,
    planted_support: Option<Vec<usize>>,
    result: QompBody,
}

pub fn qomp_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, base): (QompCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed);
    let noise = cfg.noise.model(seed)?;
    let inst = cfg.instance.load(&base, seed.unwrap_or(0))?;
    let s = inst.signal()?;
    let d = &inst.dictionary;
    let max_atoms = cfg.max_atoms.unwrap_or_else(|| default_atoms(&inst));
    let mut row = Row { seed: seed.unwrap_or(0), n: d.n(), m: d.m(), k: Some(max_atoms), ..Row::default() };
    let body = if let Some(eta) = cfg.eta {
        let options =
            SupportRecoveryOptions { gamma: cfg.gamma, access: cfg.access, poly: cfg.poly, ..Default::default() };
        let out = support_recovery(d, s, max_atoms, cfg.epsilon, eta, noise, options)?;
        row.mu = Some(out.mu);
        row.eta = Some(eta);
        row.gamma = Some(out.gamma);
        QompBody::Recovery(out)
    } else {
        let (Some(eps_i), Some(eps_f)) = (cfg.eps_i, cfg.eps_f) else {
            bail!("qomp needs eps_i and eps_f, or eta for derived budgets");
        };
        let mut qc = QompConfig::new(max_atoms, cfg.epsilon, eps_i, eps_f, noise);
        qc.gamma = cfg.gamma.map_or(Gamma::Auto, Gamma::Fixed);
        qc.access = cfg.access;
        qc.poly = cfg.poly;
        row.gamma = cfg.gamma;
        QompBody::Run(qomp_run(d, s, &qc)?)
    };
    let run = match &body {
        QompBody::Run(r) => r,
        QompBody::Recovery(r) => &r.run,
    };
    let result = run.result();
    row.epsilon = Some(cfg.epsilon);
    row.status = result.status.as_str().into();
    row.error = Some(final_residual(&result, s.norm()));
    row.u_s = Some(run.ledger.totals.signal_total());
    row.u_d = Some(run.ledger.totals.dictionary_total());
    row.iterations = Some(result.iterations);
    row.support_ok = subset_of(&result.support, inst.planted.as_ref());
    let exit = status_exit(result.status);
    let record = QompRecord {
        command: "qomp",
        seed,
        n: d.n(),
        m: d.m(),
        planted_support: inst.planted.as_ref().map(Support::sorted),
        result: body,
    };
    Ok(Outcome { json: Some(to_json(&record)?), rows: vec![row], exit })
}

fn sweep_trial(cfg: &SweepCommand, n: usize, m: usize, k: usize, trial: usize, seed: u64) -> Row {
    let mut row = Row { seed, n, m, k: Some(k), epsilon: Some(cfg.epsilon), trial: Some(trial), ..Row::default() };
    if let Err(e) = fill_trial(cfg, n, m, k, seed, &mut row) {
        row.status = "error".into();
        row.message = Some(format!("{e:#}"));
    }
    row
}

fn fill_trial(cfg: &SweepCommand, n: usize, m: usize, k: usize, seed: u64, row: &mut Row) -> Result<()> {
    let spec = GenerateSpec {
        n,
        m,
        k,
        dictionary: cfg.dictionary,
        incoherent_eta: cfg.incoherent.then_some(cfg.eta),
        attempts: 1000,
    };
    let inst = spec.generate(seed)?;
    row.mu = inst.mu;
    let s = inst.signal()?;
    let d = &inst.dictionary;
    let planted = inst.planted.as_ref();
    let noise = cfg.noise.model(Some(seed))?;
    let options = SupportRecoveryOptions {
        gamma: cfg.gamma,
        access: cfg.access,
        poly: cfg.poly,
        execution: Execution::Sequential,
    };
    let (result, ledger) = match cfg.solver {
        Solver::Omp => (omp(d, s, k, cfg.epsilon)?, None),
        Solver::OmpProjection => (omp_projection(d, s, k, cfg.epsilon)?, None),
        Solver::Qomp => {
            let (Some(eps_i), Some(eps_f)) = (cfg.eps_i, cfg.eps_f) else {
                bail!("qomp sweeps need eps_i and eps_f");
            };
            let mut qc = QompConfig::new(k, cfg.epsilon, eps_i, eps_f, noise);
            qc.gamma = cfg.gamma.map_or(Gamma::Auto, Gamma::Fixed);
            qc.access = cfg.access;
            qc.poly = cfg.poly;
            qc.execution = Execution::Sequential;
            row.gamma = cfg.gamma;
            let run = qomp_run(d, s, &qc)?;
            (run.result(), Some(run.ledger))
        }
        Solver::SupportRecovery => {
            let out = support_recovery(d, s, k, cfg.epsilon, cfg.eta, noise, options)?;
            row.mu = Some(out.mu);
            row.eta = Some(cfg.eta);
            row.gamma = Some(out.gamma);
            (out.run.result(), Some(out.run.ledger))
        }
        Solver::Tomography => {
            let report = tomography_pipeline(d, s, k, cfg.epsilon, cfg.eta, cfg.delta, noise, options)?;
            row.eta = Some(cfg.eta);
            row.status = "converged".into();
            row.error = Some(report.reconstruction_error);
            row.u_s = Some(report.ledger.totals.signal_total());
            row.u_d = Some(report.ledger.totals.dictionary_total());
            row.iterations = Some(report.ledger.per_iteration.len());
            row.support_ok = subset_of(&report.support, planted);
            return Ok(());
        }
    };
    row.status = result.status.as_str().into();
    row.error = Some(final_residual(&result, s.norm()));
    row.u_s = ledger.as_ref().map(|l| l.totals.signal_total());
    row.u_d = ledger.as_ref().map(|l| l.totals.dictionary_total());
    row.iterations = Some(result.iterations);
    row.support_ok = subset_of(&result.support, planted);
    Ok(())
}

/// One row per grid point and trial; trial `t` uses seed `seed + t`.
pub fn sweep_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, _): (SweepCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed).context("sweeps need a seed")?;
    ensure!(cfg.epsilon > 0.0, "epsilon must be positive");
    let mut points = Vec::new();
    for &n in &cfg.n {
        for &m in &cfg.m {
            for &k in &cfg.k {
                points.extend((0..cfg.trials).map(|t| (n, m, k, t)));
            }
        }
    }
    let rows = map_indexed(Execution::default(), points.len(), |i| {
        let (n, m, k, t) = points[i];
        sweep_trial(&cfg, n, m, k, t, seed.wrapping_add(t as u64))
    });
    Ok(Outcome { json: None, rows, exit: 0 })
}

#[derive(Serialize)]
struct X3cSolution {
    epsilon: f64,
    x3c_cover: Option<Vec<usize>>,
    bitmask_cover: Option<Vec<usize>>,
    sparse_support: Option<Vec<usize>>,
    sparse_residual: Option<f64>,
    verified_cover: Option<Vec<usize>>,
    /// Whether the exact-cover and sparse-recovery answers agree on satisfiability.
    agree: bool,
}

#[derive(Serialize)]
struct X3cRecord {
    #[serde(flatten)]
    instance: X3cInstance,
    eps_bound: f64,
    dictionary: MatrixRecord,
    signal: MatrixRecord,
    solution: Option<X3cSolution>,
}

pub fn reduce_x3c_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, base): (ReduceX3cCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let instance = match (&cfg.instance, &cfg.generate) {
        (Some(p), None) => {
            let p = base.join(p);
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            let inst: X3cInstance = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            inst.validate()?;
            inst
        }
        (None, Some(g)) => {
            let mut r = rng(seed);
            if g.planted {
                ensure!(g.triples >= g.ground / 3, "a planted cover needs at least N/3 triples");
                planted_cover_instance(g.ground, g.triples - g.ground / 3, &mut r)?
            } else {
                random_instance(g.ground, g.triples, &mut r)?
            }
        }
        _ => bail!("give exactly one of instance and generate"),
    };
    let reduction = reduce_x3c(&instance)?;
    let solution = if cfg.solve && instance.triples().len() <= TRIPLE_GUARD {
        let epsilon = cfg.epsilon.unwrap_or(0.9 * reduction.eps_bound);
        let x3c_cover = x3c_brute(&instance)?;
        let sparse = reduced_sparse_solution(&instance, epsilon)?;
        Some(X3cSolution {
            epsilon,
            bitmask_cover: x3c_bitmask(&instance)?,
            sparse_residual: sparse.as_ref().map(|s| reduced_residual(&reduction, s)),
            verified_cover: verify_reduction(&instance, sparse.as_ref()),
            agree: x3c_cover.is_some() == sparse.is_some(),
            sparse_support: sparse.as_ref().map(Support::sorted),
            x3c_cover,
        })
    } else {
        None
    };
    let record = X3cRecord {
        dictionary: MatrixRecord::from_dictionary(&reduction.dictionary),
        signal: MatrixRecord::from_signal(&reduction.signal),
        eps_bound: reduction.eps_bound,
        solution,
        instance,
    };
    Ok(Outcome { json: Some(to_json(&record)?), rows: Vec::new(), exit: 0 })
}

#[derive(Serialize)]
struct MuRecord {
    estimate: MuEstimate,
    classical: f64,
    within_tolerance: bool,
    ledger: QueryLedger,
}

pub fn estimate_mu_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, base): (EstimateMuCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed);
    let noise = cfg.noise.model(seed)?;
    let inst = cfg.instance.load(&base, seed.unwrap_or(0))?;
    let d = &inst.dictionary;
    let mut ledger = QueryLedger::new();
    let estimate = estimate_mutual_incoherence_q(
        d,
        cfg.epsilon,
        cfg.delta,
        Execution::default(),
        &mut noise.stream(0),
        &mut ledger,
    )?;
    let classical = mutual_incoherence(d, Execution::default())?;
    let row = Row {
        seed: seed.unwrap_or(0),
        n: d.n(),
        m: d.m(),
        mu: Some(estimate.value),
        epsilon: Some(cfg.epsilon),
        status: "converged".into(),
        error: Some((estimate.value - classical).abs()),
        u_s: Some(ledger.totals.signal_total()),
        u_d: Some(ledger.totals.dictionary_total()),
        ..Row::default()
    };
    let record = MuRecord {
        within_tolerance: (estimate.value - classical).abs() <= estimate.tolerance,
        estimate,
        classical,
        ledger,
    };
    Ok(Outcome { json: Some(to_json(&record)?), rows: vec![row], exit: 0 })
}

#[derive(Serialize)]
struct TomographyRecord {
    seed: Option<u64>,
    n: usize,
    m: usize,
    k: usize,
    planted_support: Option<Vec<usize>>,
    report: TomographyReport,
}

pub fn tomography_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, base): (TomographyCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed);
    let noise = cfg.noise.model(seed)?;
    let inst = cfg.instance.load(&base, seed.unwrap_or(0))?;
    let s = inst.signal()?;
    let d = &inst.dictionary;
    let k = cfg.k.or(inst.k).context("tomography needs k")?;
    let options = SupportRecoveryOptions { gamma: cfg.gamma, access: cfg.access, poly: cfg.poly, ..Default::default() };
    let report = tomography_pipeline(d, s, k, cfg.epsilon, cfg.eta, cfg.delta, noise, options)?;
    let row = Row {
        seed: seed.unwrap_or(0),
        n: d.n(),
        m: d.m(),
        k: Some(k),
        eta: Some(cfg.eta),
        epsilon: Some(cfg.epsilon),
        status: "converged".into(),
        error: Some(report.reconstruction_error),
        u_s: Some(report.ledger.totals.signal_total()),
        u_d: Some(report.ledger.totals.dictionary_total()),
        iterations: Some(report.ledger.per_iteration.len()),
        support_ok: subset_of(&report.support, inst.planted.as_ref()),
        ..Row::default()
    };
    let record = TomographyRecord {
        seed,
        n: d.n(),
        m: d.m(),
        k,
        planted_support: inst.planted.as_ref().map(Support::sorted),
        report,
    };
    Ok(Outcome { json: Some(to_json(&record)?), rows: vec![row], exit: 0 })
}

#[derive(Serialize)]
struct BenchEntry {
    n: usize,
    m: usize,
    k: usize,
    status: Status,
    /// Ledger `U_D` calls per QOMP iteration.
    u_d_per_iteration: Vec<u64>,
    u_s_total: u64,
    /// Analytic per-iteration cost at the run's budgets.
    model_per_iteration: f64,
    /// Arithmetic operations of one classical iteration, `n m + n k^2`.
    classical_per_iteration: u64,
}

/// Query ledgers against analytic cost formulas; no wall-clock timing, so
/// the output is reproducible.
pub fn bench_cmd(path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let (cfg, _): (BenchCommand, _) = read_config(path)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let mut entries = Vec::new();
    for &n in &cfg.n {
        for &m in &cfg.m {
            for &k in &cfg.k {
                let inst = GenerateSpec { n, m, k, dictionary: Default::default(), incoherent_eta: None, attempts: 1 }
                    .generate(seed)?;
                let s = inst.signal()?;
                let planted = inst.planted.as_ref().context("generated instance has a support")?;
                let gamma = Some(inst.dictionary.sigma_min(planted));
                let options = SupportRecoveryOptions { gamma, access: cfg.access, ..Default::default() };
                let out = support_recovery(&inst.dictionary, s, k, cfg.epsilon, cfg.eta, NoiseModel::exact(), options)?;
                entries.push(BenchEntry {
                    n,
                    m,
                    k,
                    status: out.run.status,
                    u_d_per_iteration: out.run.ledger.per_iteration.iter().map(|c| c.dictionary_total()).collect(),
                    u_s_total: out.run.ledger.totals.signal_total(),
                    model_per_iteration: iteration_cost_model(
                        k,
                        m,
                        s.norm().max(1.0),
                        out.eps_i,
                        out.eps_f,
                        out.gamma,
                        cfg.access,
                        None,
                    ),
                    classical_per_iteration: (n * m + n * k * k) as u64,
                });
            }
        }
    }
    Ok(Outcome { json: Some(to_json(&entries)?), rows: Vec::new(), exit: 0 })
}
