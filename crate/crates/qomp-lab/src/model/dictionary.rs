use serde::{Deserialize, Serialize};

use super::linalg::{self, ThinSvd};
use super::{CMatrix, CVector, ModelError, C64};

/// Matrix whose columns (atoms) all have unit Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary {
    atoms: CMatrix,
}

impl Dictionary {
    /// Normalizes every column of `matrix`.
    pub fn new(matrix: CMatrix) -> Result<Self, ModelError> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(ModelError::Empty);
        }
        let mut atoms = matrix;
        let n = atoms.nrows();
        for j in 0..atoms.ncols() {
            let col = &mut atoms.as_mut_slice()[j * n..(j + 1) * n];
            let norm = linalg::norm(col);
            if norm == 0.0 || !norm.is_finite() {
                return Err(ModelError::ZeroColumn(j));
            }
            if (norm - 1.0).abs() > 1e-15 {
                col.iter_mut().for_each(|z| *z /= norm);
            }
        }
        Ok(Self { atoms })
    }

    pub fn from_real(n: usize, m: usize, row_major: &[f64]) -> Result<Self, ModelError> {
        if row_major.len() != n * m {
            return Err(ModelError::DimensionMismatch { expected: n * m, got: row_major.len() });
        }
        Self::new(CMatrix::from_fn(n, m, |i, j| C64::new(row_major[i * m + j], 0.0)))
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        self.atoms.nrows()
    }

    /// Number of atoms.
    pub fn m(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.atoms
    }

    pub fn atom(&self, j: usize) -> &[C64] {
        linalg::column(&self.atoms, j)
    }

    /// `n x m` matrix equal to the dictionary on `support` and zero elsewhere.
    pub fn restrict(&self, support: &Support) -> CMatrix {
        let mut out = CMatrix::zeros(self.n(), self.m());
        for &j in support.iter() {
            out.set_column(j, &self.atoms.column(j));
        }
        out
    }

    /// The `n x k` matrix of the atoms in `support`, in insertion order.
    pub fn columns(&self, support: &Support) -> CMatrix {
        let n = self.n();
        CMatrix::from_fn(n, support.len(), |i, c| self.atoms[(i, support.as_slice()[c])])
    }

    pub fn thin_svd(&self, support: &Support) -> ThinSvd {
        linalg::thin_svd(&self.columns(support))
    }

    /// Orthogonal projection of `x` onto span{d_j : j in support} and its norm.
    pub fn project(&self, support: &Support, x: &[C64]) -> (CVector, f64) {
        if support.is_empty() {
            return (CVector::zeros(x.len()), 0.0);
        }
        let p = linalg::project_colspace(&self.columns(support), x);
        let norm = p.norm();
        (p, norm)
    }

    /// Least-squares coefficients on `support`, scattered into a length-`m` vector.
    pub fn least_squares(&self, support: &Support, s: &[C64]) -> CVector {
        let mut x = CVector::zeros(self.m());
        if support.is_empty() {
            return x;
        }
        let compact = linalg::pinv(&self.columns(support)) * CVector::from_column_slice(s);
        for (c, &j) in support.iter().enumerate() {
            x[j] = compact[c];
        }
        x
    }

    /// Smallest singular value of the selected atoms (zero for an empty or
    /// rank-deficient selection).
    pub fn sigma_min(&self, support: &Support) -> f64 {
        let k = support.len();
        if k == 0 {
            return 0.0;
        }
        let sv = linalg::singular_values(&self.columns(support));
        if k > self.n() {
            return 0.0;
        }
        sv.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Smallest singular value above the rank cutoff.
    pub fn sigma_min_nonzero(&self, support: &Support) -> f64 {
        self.thin_svd(support).sigma.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_max(&self, support: &Support) -> f64 {
        linalg::operator_norm(&self.columns(support))
    }

    /// `sigma_max / sigma_min` of the selected atoms, infinite when singular.
    pub fn condition_number(&self, support: &Support) -> f64 {
        let smin = self.sigma_min(support);
        if smin == 0.0 {
            f64::INFINITY
        } else {
            self.sigma_max(support) / smin
        }
    }

    /// Smallest singular value of the whole dictionary (`min(n, m)` values).
    pub fn sigma_min_full(&self) -> f64 {
        linalg::singular_values(&self.atoms).last().copied().unwrap_or(0.0)
    }
}

/// A vector to be approximated.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    values: CVector,
}

impl Signal {
    pub fn new(values: CVector) -> Self {
        Self { values }
    }

    pub fn from_slice(values: &[C64]) -> Self {
        Self::new(CVector::from_column_slice(values))
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(CVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }

    pub fn as_slice(&self) -> &[C64] {
        self.values.as_slice()
    }

    pub fn vector(&self) -> &CVector {
        &self.values
    }

    /// The unit vector `|s>`.
    pub fn unit(&self) -> Result<CVector, ModelError> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(ModelError::ZeroSignal);
        }
        Ok(self.values.unscale(norm))
    }

    /// The same direction rescaled to unit norm.
    pub fn normalized(&self) -> Result<Signal, ModelError> {
        self.unit().map(Signal::new)
    }
}

/// Ordered set of atom indices; iteration order is insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Support {
    indices: Vec<usize>,
}

impl Support {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Result<Self, ModelError> {
        let mut s = Self::new();
        for j in indices {
            s.push(j)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, j: usize) -> Result<(), ModelError> {
        if self.contains(j) {
            return Err(ModelError::DuplicateIndex(j));
        }
        self.indices.push(j);
        Ok(())
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.contains(&j)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.indices.iter()
    }

    /// Indices in `0..m` not in the support, ascending.
    pub fn complement(&self, m: usize) -> Vec<usize> {
        let mut mask = vec![false; m];
        for &j in &self.indices {
            if j < m {
                mask[j] = true;
            }
        }
        (0..m).filter(|&j| !mask[j]).collect()
    }

    pub fn is_subset_of(&self, other: &Support) -> bool {
        self.indices.iter().all(|&j| other.contains(j))
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    pub fn check_range(&self, m: usize) -> Result<(), ModelError> {
        match self.indices.iter().find(|&&j| j >= m) {
            Some(&index) => Err(ModelError::IndexOutOfRange { index, len: m }),
            None => Ok(()),
        }
    }
}

impl<'a> IntoIterator for &'a Support {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}
