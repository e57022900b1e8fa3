use super::{BlockEncoding, OddPolynomial, QsvtError};
use crate::model::linalg::thin_svd;
use crate::model::{CMatrix, C64};
use crate::primitives::QueryCounts;

/// Queries for a degree-`degree` transformation: the encoding and its
/// adjoint alternate, so `ceil(d/2)` forward and `floor(d/2)` inverse calls.
pub fn svt_cost(degree: usize, encoding: QueryCounts) -> QueryCounts {
    let d = degree as u64;
    encoding.scaled(d.div_ceil(2)) + encoding.adjoint().scaled(d / 2)
}

fn transform(p: &OddPolynomial, u: &BlockEncoding) -> CMatrix {
    let svd = thin_svd(&u.matrix);
    let mut out = CMatrix::zeros(u.nrows(), u.ncols());
    for (c, &s) in svd.sigma.iter().enumerate() {
        let value = p.eval((s / u.alpha).min(1.0));
        let left = svd.u.column(c);
        let right = svd.v_t.row(c);
        out += (left * right).map(|z| z * C64::new(value, 0.0));
    }
    out
}

/// Encoding of `P^(SV)(A / alpha)`: the odd singular value transformation,
/// with `(1, q + 2, 4 d sqrt(eps_U / alpha))` parameters.
pub fn svt_apply(p: &OddPolynomial, u: &BlockEncoding) -> Result<BlockEncoding, QsvtError> {
    if u.is_degenerate() {
        return Err(QsvtError::ZeroAlpha);
    }
    let d = p.degree() as f64;
    Ok(BlockEncoding {
        matrix: transform(p, u),
        alpha: 1.0,
        ancillas: u.ancillas + 2,
        epsilon: 4.0 * d * (u.epsilon / u.alpha).sqrt(),
        cost: svt_cost(p.degree(), u.cost),
    })
}

/// [`svt_apply`] with a target output error `delta`; requires
/// `eps_U <= alpha delta^2 / (16 d^2)`.
pub fn svt_apply_with_precision(p: &OddPolynomial, u: &BlockEncoding, delta: f64) -> Result<BlockEncoding, QsvtError> {
    if u.is_degenerate() {
        return Err(QsvtError::ZeroAlpha);
    }
    let d = p.degree().max(1) as f64;
    let need = u.alpha * delta * delta / (16.0 * d * d);
    if u.epsilon > need {
        return Err(QsvtError::PrecisionInsufficient { have: u.epsilon, need });
    }
    let mut out = svt_apply(p, u)?;
    out.epsilon = delta;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linalg::operator_norm;
    use crate::qsvt::block_encode_oracular;

    fn sample() -> CMatrix {
        CMatrix::from_fn(3, 2, |i, j| C64::new((i + 2 * j) as f64 * 0.3 - 0.2, 0.1 * j as f64))
    }

    #[test]
    fn identity_polynomial_reproduces_normalized_matrix() {
        let a = sample();
        let u = block_encode_oracular(&a);
        let out = svt_apply(&OddPolynomial::identity(), &u).unwrap();
        let diff = &out.matrix - a.map(|z| z / u.alpha);
        assert!(operator_norm(&diff) < 1e-12);
        assert_eq!(out.ancillas, u.ancillas + 2);
        assert_eq!(out.epsilon, 0.0);
    }

    #[test]
    fn cost_alternates_adjoints() {
        let c = svt_cost(5, QueryCounts::dictionary(1));
        assert_eq!(c.u_d, 3);
        assert_eq!(c.u_d_dag, 2);
    }

    #[test]
    fn precision_check() {
        let mut u = block_encode_oracular(&sample());
        u.epsilon = 0.1;
        let p = OddPolynomial::identity();
        assert!(matches!(svt_apply_with_precision(&p, &u, 0.01), Err(QsvtError::PrecisionInsufficient { .. })));
        u.epsilon = 0.0;
        assert_eq!(svt_apply_with_precision(&p, &u, 0.01).unwrap().epsilon, 0.01);
    }
}
