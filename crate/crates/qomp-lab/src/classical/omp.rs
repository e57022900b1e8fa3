use serde::{Deserialize, Serialize};

use super::ClassicalError;
use crate::model::linalg::inner;
use crate::model::{CVector, Dictionary, Signal, Support};

/// Termination state of a pursuit run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Residual dropped to the threshold within the iteration limit.
    Converged,
    /// The iteration limit was reached first (the `FAIL` output).
    #[serde(rename = "fail")]
    SparsityExceeded,
    /// Every atom was selected before either exit condition held.
    MaxIterationsInternal,
    /// A norm estimate hit its expected-time cutoff.
    NonTerminating,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::SparsityExceeded => "fail",
            Status::MaxIterationsInternal => "max_iterations_internal",
            Status::NonTerminating => "non_terminating",
        }
    }
}

/// Output of a pursuit run.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    /// Selected atoms in selection order.
    pub support: Support,
    /// Least-squares coefficients (length `m`, zero off the support); absent
    /// for runs that only produce a support.
    pub coefficients: Option<CVector>,
    /// Residual norm after each completed iteration.
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    pub status: Status,
}

fn validate(d: &Dictionary, s: &Signal, max_iter: usize, eps: f64) -> Result<(), ClassicalError> {
    if max_iter == 0 {
        return Err(ClassicalError::InvalidArgument("iteration limit must be at least 1".into()));
    }
    if !(eps > 0.0) {
        return Err(ClassicalError::InvalidArgument(format!("threshold {eps} must be positive")));
    }
    if s.len() != d.n() {
        return Err(ClassicalError::DimensionMismatch { expected: d.n(), got: s.len() });
    }
    Ok(())
}

/// Greedy choice: atom outside the support with the largest `|<d_j|r>|`,
/// smallest index on ties.
fn most_correlated(d: &Dictionary, support: &Support, r: &[crate::model::C64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in support.complement(d.m()) {
        let score = inner(d.atom(j), r).norm();
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((j, score));
        }
    }
    best.map(|(j, _)| j)
}

/// Orthogonal matching pursuit with an explicit least-squares refit.
///
/// Stops with [`Status::Converged`] once `||r|| <= eps`, or with
/// [`Status::SparsityExceeded`] when `max_iter` atoms did not suffice.
pub fn omp(d: &Dictionary, s: &Signal, max_iter: usize, eps: f64) -> Result<RecoveryResult, ClassicalError> {
    validate(d, s, max_iter, eps)?;
    let mut support = Support::new();
    let mut x = CVector::zeros(d.m());
    let mut r = s.vector().clone();
    let mut residual_norms = Vec::new();
    let status = loop {
        if r.norm() <= eps {
            break Status::Converged;
        }
        if support.len() == max_iter {
            break Status::SparsityExceeded;
        }
        let Some(j) = most_correlated(d, &support, r.as_slice()) else {
            break Status::MaxIterationsInternal;
        };
        support.push(j)?;
        x = d.least_squares(&support, s.as_slice());
        r = s.vector() - d.matrix() * &x;
        residual_norms.push(r.norm());
    };
    Ok(RecoveryResult { iterations: support.len(), support, coefficients: Some(x), residual_norms, status })
}

/// Projection form of OMP: scores and residuals use `s - D_L D_L^+ s`
/// directly, with the coefficients fitted once at the end.
pub fn omp_projection(d: &Dictionary, s: &Signal, max_iter: usize, eps: f64) -> Result<RecoveryResult, ClassicalError> {
    validate(d, s, max_iter, eps)?;
    let mut support = Support::new();
    let mut residual_norms = Vec::new();
    let mut r = s.vector().clone();
    let status = loop {
        if r.norm() <= eps {
            break Status::Converged;
        }
        if support.len() == max_iter {
            break Status::SparsityExceeded;
        }
        let Some(j) = most_correlated(d, &support, r.as_slice()) else {
            break Status::MaxIterationsInternal;
        };
        support.push(j)?;
        let (phi, _) = d.project(&support, s.as_slice());
        r = s.vector() - phi;
        residual_norms.push(r.norm());
    };
    Ok(RecoveryResult {
        iterations: support.len(),
        coefficients: Some(d.least_squares(&support, s.as_slice())),
        support,
        residual_norms,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CMatrix, C64};

    fn identity(n: usize) -> Dictionary {
        Dictionary::new(CMatrix::identity(n, n)).unwrap()
    }

    fn basis(n: usize, entries: &[(usize, f64)]) -> Signal {
        let mut v = vec![C64::new(0.0, 0.0); n];
        for &(i, a) in entries {
            v[i] = C64::new(a, 0.0);
        }
        Signal::from_slice(&v)
    }

    #[test]
    fn one_sparse_signal() {
        let d = identity(5);
        let s = basis(5, &[(3, 1.0)]);
        let out = omp(&d, &s, 3, 1e-9).unwrap();
        assert_eq!(out.support.as_slice(), &[3]);
        assert_eq!(out.status, Status::Converged);
        assert!(out.residual_norms[0] < 1e-15);
    }

    #[test]
    fn selection_follows_coefficient_magnitude() {
        let d = identity(6);
        let s = basis(6, &[(1, 0.8), (5, 0.6)]);
        for out in [omp(&d, &s, 4, 1e-9).unwrap(), omp_projection(&d, &s, 4, 1e-9).unwrap()] {
            assert_eq!(out.support.as_slice(), &[1, 5]);
            assert!(*out.residual_norms.last().unwrap() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_signal_fails_after_limit() {
        let m = CMatrix::from_fn(3, 2, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        let d = Dictionary::new(m).unwrap();
        let s = basis(3, &[(2, 2.0)]);
        let out = omp_projection(&d, &s, 2, 0.5).unwrap();
        assert_eq!(out.status, Status::SparsityExceeded);
        assert_eq!(out.residual_norms, vec![2.0, 2.0]);
    }

    #[test]
    fn exhausting_atoms_is_reported() {
        let d = identity(2);
        let s = basis(2, &[(0, 1.0), (1, 1.0)]);
        let out = omp(&d, &s, 5, 1e-30).unwrap();
        assert!(matches!(out.status, Status::Converged | Status::MaxIterationsInternal));
        assert_eq!(out.iterations, 2);
    }

    #[test]
    fn argument_validation() {
        let d = identity(2);
        let s = basis(2, &[(0, 1.0)]);
        assert!(omp(&d, &s, 0, 0.1).is_err());
        assert!(omp(&d, &s, 1, 0.0).is_err());
        assert!(omp(&d, &basis(3, &[]), 1, 0.1).is_err());
    }
}
