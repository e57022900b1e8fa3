//! Seeded instance generators.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classical::mi_condition;
use crate::exec::Execution;
use crate::model::{mutual_incoherence, CMatrix, CVector, Dictionary, ModelError, Signal, Support, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n x m` dictionary with i.i.d. complex Gaussian entries, columns normalized.
pub fn gaussian_dictionary<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Dictionary, ModelError> {
    let mut entries = Vec::with_capacity(n * m);
    for _ in 0..n * m {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        entries.push(C64::new(re, im));
    }
    Dictionary::new(CMatrix::from_vec(n, m, entries))
}

/// Identity followed by the unitary DFT: `n x 2n`, mutual incoherence `1/sqrt(n)`.
pub fn union_of_bases(n: usize) -> Result<Dictionary, ModelError> {
    let scale = 1.0 / (n as f64).sqrt();
    Dictionary::new(CMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        } else {
            let k = (j - n) as f64;
            C64::from_polar(scale, -2.0 * PI * i as f64 * k / n as f64)
        }
    }))
}

/// A `k`-sparse combination of atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedSignal {
    pub signal: Signal,
    /// Planted atoms, ascending.
    pub support: Support,
    /// Length-`m` coefficient vector.
    pub coefficients: CVector,
}

/// Signal `D x` with `k` random atoms, coefficient magnitudes uniform in
/// `[0.5, 1.5]` and uniform phases.
pub fn planted_signal<R: Rng>(d: &Dictionary, k: usize, rng: &mut R) -> Result<PlantedSignal, ModelError> {
    if k == 0 || k > d.m() {
        return Err(ModelError::IndexOutOfRange { index: k, len: d.m() });
    }
    let mut atoms: Vec<usize> = sample(rng, d.m(), k).into_vec();
    atoms.sort_unstable();
    let mut x = CVector::zeros(d.m());
    for &j in &atoms {
        let magnitude = rng.gen_range(0.5..=1.5);
        let phase = rng.gen_range(0.0..2.0 * PI);
        x[j] = C64::from_polar(magnitude, phase);
    }
    let signal = Signal::new(d.matrix() * &x);
    Ok(PlantedSignal { signal, support: Support::from_indices(atoms)?, coefficients: x })
}

/// Parameters of a planted instance whose dictionary satisfies the
/// incoherence condition `k < (1 - eta)/(2 - eta) (1/mu + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncoherentSpec {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eta: f64,
}

#[derive(Clone, Debug)]
pub struct IncoherentInstance {
    pub dictionary: Dictionary,
    pub planted: PlantedSignal,
    pub mu: f64,
}

/// Draws Gaussian dictionaries until the incoherence condition holds, then
/// plants a signal. Gives up after `attempts` draws.
pub fn incoherent_instance<R: Rng>(
    spec: IncoherentSpec,
    attempts: usize,
    rng: &mut R,
) -> Result<Option<IncoherentInstance>, ModelError> {
    for _ in 0..attempts {
        let d = gaussian_dictionary(spec.n, spec.m, rng)?;
        let mu = mutual_incoherence(&d, Execution::Sequential)?;
        if mi_condition(mu, spec.k, spec.eta) {
            let planted = planted_signal(&d, spec.k, rng)?;
            return Ok(Some(IncoherentInstance { dictionary: d, planted, mu }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_columns_are_unit() {
        let d = gaussian_dictionary(5, 7, &mut rng(1)).unwrap();
        for j in 0..7 {
            let n: f64 = d.atom(j).iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn union_of_bases_incoherence() {
        let d = union_of_bases(16).unwrap();
        let mu = mutual_incoherence(&d, Execution::Sequential).unwrap();
        assert!((mu - 0.25).abs() < 1e-12);
    }

    #[test]
    fn planted_signal_is_a_combination() {
        let d = gaussian_dictionary(6, 10, &mut rng(2)).unwrap();
        let p = planted_signal(&d, 3, &mut rng(3)).unwrap();
        assert_eq!(p.support.len(), 3);
        for j in 0..10 {
            let m = p.coefficients[j].norm();
            if p.support.contains(j) {
                assert!((0.5..=1.5 + 1e-12).contains(&m));
            } else {
                assert_eq!(m, 0.0);
            }
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = gaussian_dictionary(4, 4, &mut rng(9)).unwrap();
        let b = gaussian_dictionary(4, 4, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn incoherent_instances_meet_the_condition() {
        let spec = IncoherentSpec { n: 64, m: 16, k: 2, eta: 0.25 };
        let inst = incoherent_instance(spec, 50, &mut rng(4)).unwrap().unwrap();
        assert!(mi_condition(inst.mu, 2, 0.25));
    }
}
