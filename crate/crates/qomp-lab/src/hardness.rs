//! Reduction from exact cover by 3-sets to sparse recovery of a uniform
//! superposition, exhaustive cover finders, and instance generators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{brute_force_l0, ClassicalError};
use crate::model::{CMatrix, Dictionary, ModelError, Signal, Support, C64};

/// Largest triple count the exhaustive finders accept.
pub const TRIPLE_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HardnessError {
    #[error("ground set size {0} is not a positive multiple of 3")]
    InvalidGround(usize),
    #[error("triple {index} {triple:?} needs three distinct elements below the ground size")]
    InvalidTriple { index: usize, triple: [usize; 3] },
    #[error("{count} triples exceed the limit of {limit}")]
    TooManyTriples { count: usize, limit: usize },
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Ground set `{0, ..., N-1}` and a list of 3-element subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct X3cInstance {
    #[serde(rename = "N")]
    ground: usize,
    triples: Vec<[usize; 3]>,
}

impl X3cInstance {
    pub fn new(ground: usize, triples: Vec<[usize; 3]>) -> Result<Self, HardnessError> {
        let inst = Self { ground, triples };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks an instance obtained by deserialization.
    pub fn validate(&self) -> Result<(), HardnessError> {
        if self.ground == 0 || !self.ground.is_multiple_of(3) {
            return Err(HardnessError::InvalidGround(self.ground));
        }
        for (index, t) in self.triples.iter().enumerate() {
            let distinct = t[0] != t[1] && t[1] != t[2] && t[0] != t[2];
            if !distinct || t.iter().any(|&e| e >= self.ground) {
                return Err(HardnessError::InvalidTriple { index, triple: *t });
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    fn mask(&self, i: usize) -> u64 {
        self.triples[i].iter().fold(0, |m, &e| m | 1 << e)
    }

    fn guard(&self) -> Result<(), HardnessError> {
        if self.triples.len() > TRIPLE_GUARD || self.ground > 63 {
            return Err(HardnessError::TooManyTriples { count: self.triples.len(), limit: TRIPLE_GUARD });
        }
        Ok(())
    }

    /// Whether the listed triples are pairwise disjoint and cover the ground set.
    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut covered = 0u128;
        for &i in chosen {
            for &e in &self.triples[i] {
                if covered & (1 << e) != 0 {
                    return false;
                }
                covered |= 1 << e;
            }
        }
        covered.count_ones() as usize == self.ground
    }
}

/// Sparse-recovery instance built from an exact-cover instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// Atom `i` is uniform with amplitude `1/sqrt(3)` on triple `i`.
    pub dictionary: Dictionary,
    /// Uniform superposition over the ground set.
    pub signal: Signal,
    /// `sqrt(3/N)`.
    pub eps_bound: f64,
}

pub fn reduce_x3c(inst: &X3cInstance) -> Result<Reduction, HardnessError> {
    let n = inst.ground;
    let amp = 1.0 / 3f64.sqrt();
    let mut a = CMatrix::zeros(n, inst.triples.len());
    for (i, t) in inst.triples.iter().enumerate() {
        for &e in t {
            a[(e, i)] = C64::new(amp, 0.0);
        }
    }
    let signal = Signal::from_real(&vec![1.0 / (n as f64).sqrt(); n]);
    Ok(Reduction { dictionary: Dictionary::new(a)?, signal, eps_bound: (3.0 / n as f64).sqrt() })
}

/// Residual of the least-squares fit of the reduced target on `support`.
pub fn reduced_residual(reduction: &Reduction, support: &Support) -> f64 {
    let (phi, _) = reduction.dictionary.project(support, reduction.signal.as_slice());
    (reduction.signal.vector() - phi).norm()
}

/// Maps a sparse solution of the reduced instance back to an exact cover:
/// at most `N/3` atoms, residual below `sqrt(3/N)`, and the triples must be
/// pairwise disjoint and cover everything. Returns the cover's triple
/// indices in ascending order.
pub fn verify_reduction(inst: &X3cInstance, support: Option<&Support>) -> Option<Vec<usize>> {
    let support = support?;
    if support.len() > inst.ground / 3 || support.check_range(inst.triples.len()).is_err() {
        return None;
    }
    let reduction = reduce_x3c(inst).ok()?;
    if reduced_residual(&reduction, support) >= reduction.eps_bound {
        return None;
    }
    let chosen = support.sorted();
    inst.is_exact_cover(&chosen).then_some(chosen)
}

/// Smallest-support solution of the reduced instance at threshold `eps` with
/// at most `N/3` atoms.
pub fn reduced_sparse_solution(inst: &X3cInstance, eps: f64) -> Result<Option<Support>, HardnessError> {
    inst.guard()?;
    let r = reduce_x3c(inst)?;
    Ok(brute_force_l0(&r.dictionary, &r.signal, eps, inst.ground / 3)?.map(|(s, _)| s))
}

/// Exact cover by depth-first search: branch on the smallest uncovered
/// element over the triples containing it.
pub fn x3c_brute(inst: &X3cInstance) -> Result<Option<Vec<usize>>, HardnessError> {
    inst.guard()?;
    let full: u64 = if inst.ground == 64 { u64::MAX } else { (1u64 << inst.ground) - 1 };
    let masks: Vec<u64> = (0..inst.triples.len()).map(|i| inst.mask(i)).collect();
    fn search(covered: u64, full: u64, masks: &[u64], chosen: &mut Vec<usize>) -> bool {
        if covered == full {
            return true;
        }
        let element = (!covered).trailing_zeros();
        for (i, &m) in masks.iter().enumerate() {
            if m & (1 << element) != 0 && m & covered == 0 {
                chosen.push(i);
                if search(covered | m, full, masks, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(search(0, full, &masks, &mut chosen).then(|| {
        chosen.sort_unstable();
        chosen
    }))
}

/// Exact cover by enumerating every subset of triples as a bitmask; the
/// first cover in increasing mask order.
pub fn x3c_bitmask(inst: &X3cInstance) -> Result<Option<Vec<usize>>, HardnessError> {
    inst.guard()?;
    let count = inst.triples.len();
    let target = inst.ground / 3;
    let masks: Vec<u64> = (0..count).map(|i| inst.mask(i)).collect();
    let full: u64 = (1u64 << inst.ground) - 1;
    for subset in 0u32..(1u32 << count) {
        if subset.count_ones() as usize != target {
            continue;
        }
        let mut covered = 0u64;
        let mut disjoint = true;
        for (i, &m) in masks.iter().enumerate() {
            if subset & (1 << i) != 0 {
                disjoint &= covered & m == 0;
                covered |= m;
            }
        }
        if disjoint && covered == full {
            return Ok(Some((0..count).filter(|i| subset & (1 << i) != 0).collect()));
        }
    }
    Ok(None)
}

fn random_triple<R: Rng>(ground: usize, rng: &mut R) -> [usize; 3] {
    let picked = rand::seq::index::sample(rng, ground, 3).into_vec();
    let mut t = [picked[0], picked[1], picked[2]];
    t.sort_unstable();
    t
}

/// An instance with a hidden exact cover plus `extra` random triples, in
/// shuffled order.
pub fn planted_cover_instance<R: Rng>(ground: usize, extra: usize, rng: &mut R) -> Result<X3cInstance, HardnessError> {
    if ground == 0 || !ground.is_multiple_of(3) {
        return Err(HardnessError::InvalidGround(ground));
    }
    let mut elements: Vec<usize> = (0..ground).collect();
    elements.shuffle(rng);
    let mut triples: Vec<[usize; 3]> = elements
        .chunks(3)
        .map(|c| {
            let mut t = [c[0], c[1], c[2]];
            t.sort_unstable();
            t
        })
        .collect();
    triples.extend((0..extra).map(|_| random_triple(ground, rng)));
    triples.shuffle(rng);
    X3cInstance::new(ground, triples)
}

/// `count` uniformly random triples.
pub fn random_instance<R: Rng>(ground: usize, count: usize, rng: &mut R) -> Result<X3cInstance, HardnessError> {
    if ground == 0 || !ground.is_multiple_of(3) {
        return Err(HardnessError::InvalidGround(ground));
    }
    X3cInstance::new(ground, (0..count).map(|_| random_triple(ground, rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::rng;

    #[test]
    fn single_triple() {
        let inst = X3cInstance::new(3, vec![[0, 1, 2]]).unwrap();
        let r = reduce_x3c(&inst).unwrap();
        assert_eq!(r.eps_bound, 1.0);
        for z in r.dictionary.atom(0) {
            assert!((z.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        assert_eq!(x3c_brute(&inst).unwrap(), Some(vec![0]));
    }

    #[test]
    fn twelve_elements_threshold() {
        let inst = random_instance(12, 5, &mut rng(1)).unwrap();
        assert!((reduce_x3c(&inst).unwrap().eps_bound - 0.5).abs() < 1e-15);
    }

    #[test]
    fn overlapping_triples_have_no_cover() {
        let inst = X3cInstance::new(6, vec![[0, 1, 2], [2, 3, 4], [1, 4, 5]]).unwrap();
        assert_eq!(x3c_brute(&inst).unwrap(), None);
        assert_eq!(x3c_bitmask(&inst).unwrap(), None);
        let support = Support::from_indices([0, 1]).unwrap();
        assert_eq!(verify_reduction(&inst, Some(&support)), None);
    }

    #[test]
    fn planted_cover_maps_back() {
        let inst = X3cInstance::new(6, vec![[1, 3, 5], [0, 1, 2], [0, 2, 4]]).unwrap();
        let support = Support::from_indices([2, 0]).unwrap();
        assert_eq!(verify_reduction(&inst, Some(&support)), Some(vec![0, 2]));
        let sparse = reduced_sparse_solution(&inst, 0.0).unwrap().unwrap();
        assert_eq!(sparse.sorted(), vec![0, 2]);
    }

    #[test]
    fn invalid_instances() {
        assert_eq!(X3cInstance::new(4, vec![]), Err(HardnessError::InvalidGround(4)));
        assert!(matches!(X3cInstance::new(3, vec![[0, 0, 1]]), Err(HardnessError::InvalidTriple { .. })));
        assert!(matches!(X3cInstance::new(3, vec![[0, 1, 3]]), Err(HardnessError::InvalidTriple { .. })));
    }

    #[test]
    fn json_format() {
        let inst: X3cInstance = serde_json::from_str(r#"{"N": 3, "triples": [[0, 1, 2]]}"#).unwrap();
        assert_eq!(inst.triples(), &[[0, 1, 2]]);
    }

    #[test]
    fn enumerators_agree() {
        let mut r = rng(7);
        for i in 0..40 {
            let inst = if i % 2 == 0 {
                planted_cover_instance(9, 4, &mut r).unwrap()
            } else {
                random_instance(9, 8, &mut r).unwrap()
            };
            let a = x3c_brute(&inst).unwrap();
            let b = x3c_bitmask(&inst).unwrap();
            assert_eq!(a.is_some(), b.is_some());
            if let Some(c) = a {
                assert!(inst.is_exact_cover(&c));
            }
        }
    }
}
