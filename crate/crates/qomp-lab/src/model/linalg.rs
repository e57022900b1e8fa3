//! Small dense linear-algebra kernels on complex slices and matrices.

use super::{CMatrix, CVector, C64};

/// Singular values below `RANK_CUTOFF * sigma_max` are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// `<a|b> = sum conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Column `j` of a column-major matrix as a contiguous slice.
pub fn column(a: &CMatrix, j: usize) -> &[C64] {
    let n = a.nrows();
    &a.as_slice()[j * n..(j + 1) * n]
}

/// Compact SVD truncated to the numerical rank.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    /// Left singular vectors, `n x r`.
    pub u: CMatrix,
    /// Singular values in decreasing order, length `r`.
    pub sigma: Vec<f64>,
    /// Right singular vectors (adjoint), `r x m`.
    pub v_t: CMatrix,
}

impl ThinSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

/// All singular values of `a`, largest first.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// SVD with singular values below the rank cutoff dropped.
pub fn thin_svd(a: &CMatrix) -> ThinSvd {
    let (n, m) = a.shape();
    if n == 0 || m == 0 {
        return ThinSvd { u: CMatrix::zeros(n, 0), sigma: Vec::new(), v_t: CMatrix::zeros(0, m) };
    }
    let svd = a.clone().svd(true, true);
    let u_full = svd.u.expect("left vectors requested");
    let v_full = svd.v_t.expect("right vectors requested");
    let values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let smax = order.first().map_or(0.0, |&i| values[i]);
    let keep: Vec<usize> = order.into_iter().filter(|&i| smax > 0.0 && values[i] > RANK_CUTOFF * smax).collect();
    let r = keep.len();
    let u = CMatrix::from_fn(n, r, |i, c| u_full[(i, keep[c])]);
    let v_t = CMatrix::from_fn(r, m, |c, j| v_full[(keep[c], j)]);
    ThinSvd { u, sigma: keep.iter().map(|&i| values[i]).collect(), v_t }
}

/// Moore-Penrose pseudoinverse.
pub fn pinv(a: &CMatrix) -> CMatrix {
    let svd = thin_svd(a);
    let (n, m) = a.shape();
    let mut out = CMatrix::zeros(m, n);
    for (c, &s) in svd.sigma.iter().enumerate() {
        let v = svd.v_t.row(c).adjoint();
        let u = svd.u.column(c).adjoint();
        out += (v * u).map(|z| z / s);
    }
    out
}

/// Orthogonal projection of `x` onto the column space of `a`.
pub fn project_colspace(a: &CMatrix, x: &[C64]) -> CVector {
    let svd = thin_svd(a);
    let x = CVector::from_column_slice(x);
    let coeffs = svd.u.adjoint() * &x;
    &svd.u * coeffs
}

/// Spectral norm.
pub fn operator_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inner_conjugates_left_argument() {
        let a = [c(0.0, 1.0)];
        let b = [c(0.0, 1.0)];
        assert_eq!(inner(&a, &b), c(1.0, 0.0));
    }

    #[test]
    fn pinv_of_rank_deficient_matrix() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let p = pinv(&a);
        for z in p.iter() {
            assert!((z - c(0.25, 0.0)).norm() < 1e-12);
        }
        let back = &a * &p * &a;
        assert!(frobenius(&(back - &a)) < 1e-12);
    }

    #[test]
    fn projection_is_idempotent() {
        let a = CMatrix::from_fn(4, 2, |i, j| c((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        let x = [c(1.0, 2.0), c(-1.0, 0.5), c(0.0, 3.0), c(2.0, -2.0)];
        let p1 = project_colspace(&a, &x);
        let p2 = project_colspace(&a, p1.as_slice());
        assert!((p1 - p2).norm() < 1e-10);
    }
}
