use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::estimation::reps_for_confidence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Estimators return the exact value.
    Exact,
    /// Estimators sit exactly at their tolerance, random sign.
    Adversarial,
    /// Estimators follow the amplitude-estimation output distribution,
    /// including its failure branch.
    Stochastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureHandling {
    /// Single runs; failures flow into the result.
    Propagate,
    /// Median / majority over repeated runs.
    Amplified,
}

/// Configuration for simulated estimator error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub mode: NoiseMode,
    pub seed: u64,
    pub failure_handling: FailureHandling,
}

impl NoiseModel {
    pub fn new(mode: NoiseMode, seed: u64, failure_handling: FailureHandling) -> Self {
        Self { mode, seed, failure_handling }
    }

    pub fn exact() -> Self {
        Self::new(NoiseMode::Exact, 0, FailureHandling::Propagate)
    }

    pub fn adversarial(seed: u64) -> Self {
        Self::new(NoiseMode::Adversarial, seed, FailureHandling::Propagate)
    }

    pub fn stochastic(seed: u64) -> Self {
        Self::new(NoiseMode::Stochastic, seed, FailureHandling::Propagate)
    }

    pub fn amplified(self) -> Self {
        Self { failure_handling: FailureHandling::Amplified, ..self }
    }

    /// Independent random stream `id` derived from the seed.
    pub fn stream(&self, id: u64) -> Noise {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        Noise { model: *self, rng }
    }

    /// Repetitions used to push a per-estimate failure probability below `delta`.
    pub fn reps(&self, delta: f64) -> usize {
        match self.failure_handling {
            FailureHandling::Propagate => 1,
            FailureHandling::Amplified => reps_for_confidence(delta),
        }
    }
}

/// A [`NoiseModel`] together with its random stream.
#[derive(Clone, Debug)]
pub struct Noise {
    model: NoiseModel,
    rng: ChaCha8Rng,
}

impl Noise {
    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn mode(&self) -> NoiseMode {
        self.model.mode
    }

    pub fn is_exact(&self) -> bool {
        self.model.mode == NoiseMode::Exact
    }

    pub fn reps(&self, delta: f64) -> usize {
        self.model.reps(delta)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        self.rng.gen_range(lo..hi)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.gen::<f64>() < p
    }

    pub fn sign(&mut self) -> f64 {
        if self.rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let m = NoiseModel::stochastic(7);
        let a: Vec<f64> = (0..5)
            .map({
                let mut n = m.stream(1);
                move |_| n.uniform(0.0, 1.0)
            })
            .collect();
        let b: Vec<f64> = (0..5)
            .map({
                let mut n = m.stream(1);
                move |_| n.uniform(0.0, 1.0)
            })
            .collect();
        let c: Vec<f64> = (0..5)
            .map({
                let mut n = m.stream(2);
                move |_| n.uniform(0.0, 1.0)
            })
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn serde_names() {
        let m = NoiseModel::stochastic(3).amplified();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"mode":"stochastic","seed":3,"failure_handling":"amplified"}"#);
    }
}
