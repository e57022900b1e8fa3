use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::instances::{gaussian_dictionary, incoherent_instance, planted_signal, rng, union_of_bases, IncoherentSpec};
use crate::model::{Dictionary, MatrixRecord, Signal, Support};
use crate::primitives::{FailureHandling, NoiseMode, NoiseModel};
use crate::qsvt::{AccessMode, PolyKind};

/// Reads a JSON config; relative paths inside it resolve against its directory.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<(T, PathBuf)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryKind {
    /// Normalized complex Gaussian columns.
    #[default]
    Gaussian,
    /// Identity followed by the unitary DFT; needs `m = 2 n`.
    UnionOfBases,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub dictionary: DictionaryKind,
    /// Redraw Gaussian dictionaries until `k < (1-eta)/(2-eta)(1/mu+1)`.
    #[serde(default)]
    pub incoherent_eta: Option<f64>,
    #[serde(default = "default_attempts")]
    pub attempts: usize,
}

fn default_attempts() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    /// JSON file `{"dictionary": matrix, "signal": matrix, "support": [..]?}`.
    File {
        path: PathBuf,
    },
    Generate(GenerateSpec),
}

/// On-disk instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dictionary: MatrixRecord,
    #[serde(default)]
    pub signal: Option<MatrixRecord>,
    #[serde(default)]
    pub support: Option<Vec<usize>>,
}

pub struct Instance {
    pub dictionary: Dictionary,
    pub signal: Option<Signal>,
    pub planted: Option<Support>,
    pub mu: Option<f64>,
    pub k: Option<usize>,
}

impl Instance {
    pub fn signal(&self) -> Result<&Signal> {
        self.signal.as_ref().context("instance has no signal")
    }
}

impl InstanceSource {
    pub fn load(&self, base: &Path, seed: u64) -> Result<Instance> {
        match self {
            InstanceSource::File { path } => {
                let path = base.join(path);
                let text = fs::read_to_string(&path).with_context(|| format!("reading instance {}", path.display()))?;
                let file: InstanceFile =
                    serde_json::from_str(&text).with_context(|| format!("parsing instance {}", path.display()))?;
                let dictionary = file.dictionary.to_dictionary()?;
                let signal = file.signal.as_ref().map(MatrixRecord::to_signal).transpose()?;
                if let Some(s) = &signal {
                    ensure!(
                        s.len() == dictionary.n(),
                        "signal length {} does not match {} rows",
                        s.len(),
                        dictionary.n()
                    );
                }
                let planted = file.support.map(Support::from_indices).transpose()?;
                if let Some(p) = &planted {
                    p.check_range(dictionary.m())?;
                }
                let k = planted.as_ref().map(Support::len);
                Ok(Instance { dictionary, signal, planted, mu: None, k })
            }
            InstanceSource::Generate(spec) => spec.generate(seed),
        }
    }
}

impl GenerateSpec {
    pub fn generate(&self, seed: u64) -> Result<Instance> {
        ensure!(self.n > 0 && self.m > 0, "dimensions must be positive");
        ensure!(self.k <= self.m, "sparsity {} exceeds {} atoms", self.k, self.m);
        let mut r = rng(seed);
        if let Some(eta) = self.incoherent_eta {
            ensure!(self.dictionary == DictionaryKind::Gaussian, "incoherent sampling needs a Gaussian dictionary");
            let spec = IncoherentSpec { n: self.n, m: self.m, k: self.k, eta };
            let Some(inst) = incoherent_instance(spec, self.attempts, &mut r)? else {
                bail!("no dictionary met the incoherence condition in {} draws", self.attempts);
            };
            return Ok(Instance {
                dictionary: inst.dictionary,
                signal: Some(inst.planted.signal),
                planted: Some(inst.planted.support),
                mu: Some(inst.mu),
                k: Some(self.k),
            });
        }
        let dictionary = match self.dictionary {
            DictionaryKind::Gaussian => gaussian_dictionary(self.n, self.m, &mut r)?,
            DictionaryKind::UnionOfBases => {
                ensure!(self.m == 2 * self.n, "union of bases needs m = 2n");
                union_of_bases(self.n)?
            }
        };
        let planted = planted_signal(&dictionary, self.k, &mut r)?;
        Ok(Instance {
            dictionary,
            signal: Some(planted.signal),
            planted: Some(planted.support),
            mu: None,
            k: Some(self.k),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default = "default_mode")]
    pub mode: NoiseMode,
    #[serde(default)]
    pub amplified: bool,
}

fn default_mode() -> NoiseMode {
    NoiseMode::Exact
}

impl NoiseConfig {
    pub fn model(&self, seed: Option<u64>) -> Result<NoiseModel> {
        let seed = match (self.mode, seed) {
            (NoiseMode::Exact, s) => s.unwrap_or(0),
            (_, Some(s)) => s,
            (mode, None) => bail!("a seed is required for {mode:?} noise"),
        };
        let handling = if self.amplified { FailureHandling::Amplified } else { FailureHandling::Propagate };
        Ok(NoiseModel::new(self.mode, seed, handling))
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { mode: NoiseMode::Exact, amplified: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmpVariant {
    /// Least-squares refit each iteration.
    #[default]
    LeastSquares,
    /// Orthogonal projection of the residual.
    Projection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmpCommand {
    pub instance: InstanceSource,
    #[serde(default)]
    pub max_atoms: Option<usize>,
    pub epsilon: f64,
    #[serde(default)]
    pub variant: OmpVariant,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QompCommand {
    pub instance: InstanceSource,
    #[serde(default)]
    pub max_atoms: Option<usize>,
    pub epsilon: f64,
    #[serde(default)]
    pub eps_i: Option<f64>,
    #[serde(default)]
    pub eps_f: Option<f64>,
    /// Switches to support recovery with budgets derived from `eta`.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub access: AccessMode,
    #[serde(default)]
    pub poly: PolyKind,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Omp,
    OmpProjection,
    Qomp,
    SupportRecovery,
    Tomography,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCommand {
    pub solver: Solver,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    pub trials: usize,
    pub epsilon: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub eps_i: Option<f64>,
    #[serde(default)]
    pub eps_f: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub access: AccessMode,
    #[serde(default)]
    pub poly: PolyKind,
    #[serde(default)]
    pub dictionary: DictionaryKind,
    /// Only draw dictionaries meeting the incoherence condition at `eta`.
    #[serde(default)]
    pub incoherent: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_eta() -> f64 {
    0.25
}

fn default_delta() -> f64 {
    0.1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct X3cGenerate {
    #[serde(rename = "N")]
    pub ground: usize,
    pub triples: usize,
    /// Hide an exact cover among the triples.
    #[serde(default)]
    pub planted: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceX3cCommand {
    /// Path to an instance `{"N": .., "triples": [[a, b, c], ..]}`.
    #[serde(default)]
    pub instance: Option<PathBuf>,
    #[serde(default)]
    pub generate: Option<X3cGenerate>,
    /// Run both exhaustive solvers on small instances.
    #[serde(default = "default_true")]
    pub solve: bool,
    /// Threshold for the sparse solver; defaults to `0.9 sqrt(3/N)`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateMuCommand {
    pub instance: InstanceSource,
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyCommand {
    pub instance: InstanceSource,
    #[serde(default)]
    pub k: Option<usize>,
    pub epsilon: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub access: AccessMode,
    #[serde(default)]
    pub poly: PolyKind,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchCommand {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    pub epsilon: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub access: AccessMode,
    #[serde(default)]
    pub seed: Option<u64>,
}
