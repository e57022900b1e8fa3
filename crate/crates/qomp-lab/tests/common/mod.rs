//! Reference computations shared by the integration tests. Everything here
//! is written directly against nalgebra so it does not share code with the
//! library paths under test.

#![allow(dead_code)]

use nalgebra::DMatrix;
use qomp_lab::model::{CMatrix, CVector, Dictionary, Support, C64};

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

pub fn submatrix(d: &Dictionary, support: &[usize]) -> CMatrix {
    CMatrix::from_fn(d.n(), support.len(), |i, c| d.matrix()[(i, support[c])])
}

/// Orthonormal basis of the column space via Householder QR (columns must
/// be independent).
pub fn orthonormal_basis(a: &CMatrix) -> CMatrix {
    let k = a.ncols();
    let q = a.clone().qr().q();
    q.columns(0, k).into_owned()
}

/// `Q Q^dagger x` for the QR basis of `a`.
pub fn project(a: &CMatrix, x: &CVector) -> CVector {
    if a.ncols() == 0 {
        return CVector::zeros(x.len());
    }
    let q = orthonormal_basis(a);
    &q * (q.adjoint() * x)
}

/// Residual `s - P_{D_support} s`.
pub fn residual(d: &Dictionary, support: &[usize], s: &CVector) -> CVector {
    s - project(&submatrix(d, support), s)
}

/// Projector onto the span of the left singular vectors with singular value
/// above `tol`.
pub fn svd_projector(a: &CMatrix, tol: f64) -> CMatrix {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left vectors");
    let mut p = CMatrix::zeros(a.nrows(), a.nrows());
    for (c, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > tol {
            let col = u.column(c);
            p += col * col.adjoint();
        }
    }
    p
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

pub fn smallest_singular_value(a: &CMatrix) -> f64 {
    a.clone().svd(false, false).singular_values.min()
}

/// `max_{i != j} |<d_i|d_j>|` by a plain double loop.
pub fn coherence(d: &Dictionary) -> f64 {
    let a = d.matrix();
    let mut best = 0.0f64;
    for i in 0..a.ncols() {
        for j in i + 1..a.ncols() {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..a.nrows() {
                acc += a[(r, i)].conj() * a[(r, j)];
            }
            best = best.max(acc.norm());
        }
    }
    best
}

/// `|| a/||a|| - b/||b|| ||`.
pub fn unit_distance(a: &CVector, b: &CVector) -> f64 {
    (a.unscale(a.norm()) - b.unscale(b.norm())).norm()
}

pub fn real_matrix(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> CMatrix {
    DMatrix::from_fn(rows, cols, |i, j| C64::new(f(i, j), 0.0))
}

pub fn support_vec(s: &Support) -> Vec<usize> {
    s.sorted()
}
