use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc_inv};

use super::QsvtError;

/// Degrees returned by [`sign_poly`] satisfy
/// `degree <= C max(1, ln(1/eps)) / delta` with this `C` (measured: 3.6 to 4.7).
pub const SIGN_DEGREE_CONSTANT: f64 = 6.0;

const GRID_POINTS: usize = 10_000;
const MAX_RETRIES: usize = 3;

/// What a polynomial is certified to do.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guarantee {
    pub region: String,
    pub eps: f64,
    /// Bound on `|P|` over the bounded region.
    pub bound: f64,
}

/// Odd real polynomial `P(x) = sum_j c_j T_j(x / w)` in the Chebyshev basis
/// on `[-w, w]`; only odd `j` carry coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OddPolynomial {
    coeffs: Vec<f64>,
    half_width: f64,
    guarantee: Guarantee,
}

/// JSON export of an [`OddPolynomial`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub degree: usize,
    /// Coefficients of `T_1, T_3, T_5, ...`.
    pub chebyshev_coeffs: Vec<f64>,
    pub domain_half_width: f64,
    pub guarantee: Guarantee,
}

impl OddPolynomial {
    /// Builds from coefficients of `T_1, T_3, ...` on `[-half_width, half_width]`.
    pub fn from_odd(odd: &[f64], half_width: f64, guarantee: Guarantee) -> Self {
        let mut coeffs = vec![0.0; 2 * odd.len()];
        for (i, c) in odd.iter().enumerate() {
            coeffs[2 * i + 1] = *c;
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs, half_width, guarantee }
    }

    /// `P(x) = x`.
    pub fn identity() -> Self {
        Self::from_odd(&[1.0], 1.0, Guarantee { region: "identity".into(), eps: 0.0, bound: 1.0 })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn guarantee(&self) -> &Guarantee {
        &self.guarantee
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn odd_coefficients(&self) -> Vec<f64> {
        self.coeffs.iter().skip(1).step_by(2).copied().collect()
    }

    /// Clenshaw evaluation; exactly odd in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        let y = x / self.half_width;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * y * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        y * b1 - b2
    }

    pub fn record(&self) -> PolynomialRecord {
        PolynomialRecord {
            degree: self.degree(),
            chebyshev_coeffs: self.odd_coefficients(),
            domain_half_width: self.half_width,
            guarantee: self.guarantee.clone(),
        }
    }

    pub fn from_record(r: &PolynomialRecord) -> Self {
        Self::from_odd(&r.chebyshev_coeffs, r.domain_half_width, r.guarantee.clone())
    }
}

/// Chebyshev interpolation coefficients of `f` on `[-1, 1]` from `n` nodes.
fn chebyshev_coefficients(f: impl Fn(f64) -> f64, n: usize, keep: usize) -> Vec<f64> {
    let mut c = vec![0.0; keep];
    for k in 0..n {
        let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let x = theta.cos();
        let fx = f(x);
        let (mut t_prev, mut t_cur) = (1.0, x);
        c[0] += fx;
        for cj in c.iter_mut().skip(1) {
            *cj += fx * t_cur;
            let t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    let scale = 2.0 / n as f64;
    c.iter_mut().for_each(|v| *v *= scale);
    c[0] /= 2.0;
    c
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
}

fn validate_sign(p: &OddPolynomial, delta: f64, eps: f64) -> bool {
    grid(-2.0, 2.0, GRID_POINTS).chain([delta, -delta, 2.0, -2.0]).all(|x| {
        let v = p.eval(x);
        let bounded = v.abs() <= 1.0;
        let close = x.abs() < delta || (v - x.signum()).abs() <= eps;
        bounded && close
    })
}

fn check_args(delta: f64, eps: f64, name: &str) -> Result<(), QsvtError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(QsvtError::InvalidArgument(format!("{name} {delta} outside (0, 1)")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(QsvtError::InvalidArgument(format!("eps {eps} outside (0, 1/2)")));
    }
    Ok(())
}

/// Odd polynomial with `|P(x) - sign(x)| <= eps` for `delta <= |x| <= 2` and
/// `|P(x)| <= 1` on `[-2, 2]`.
///
/// Built by truncating the Chebyshev series of `erf(k x)` with `k` chosen so
/// that `erfc(k delta) <= eps / 2`, then shrinking slightly so the bound holds.
pub fn sign_poly(delta: f64, eps: f64) -> Result<OddPolynomial, QsvtError> {
    check_args(delta, eps, "delta")?;
    for attempt in 0..=MAX_RETRIES {
        let tighten = (1u32 << attempt) as f64;
        let erf_err = eps / 2.0 / tighten;
        let tail = eps / 8.0 / (tighten * tighten);
        let k = erfc_inv(erf_err) / delta;
        // on the rescaled variable y = x / 2 the target is erf(2 k y)
        let a = 2.0 * k;
        let mut n = 64usize;
        let coeffs = loop {
            let c = chebyshev_coefficients(|y| erf(a * y), n, n);
            let edge = c[n - 1].abs() + c[n - 2].abs();
            if edge < tail * 1e-3 || n >= 1 << 16 {
                break c;
            }
            n *= 2;
        };
        let mut degree = coeffs.len() - 1;
        let mut dropped = 0.0;
        while degree > 1 {
            let next = dropped + coeffs[degree].abs() + coeffs[degree - 1].abs();
            if next > tail {
                break;
            }
            dropped = next;
            degree -= 1;
        }
        if degree % 2 == 0 {
            degree += 1;
        }
        let shrink = 1.0 / (1.0 + tail + 1e-12);
        let odd: Vec<f64> = coeffs[..=degree].iter().skip(1).step_by(2).map(|c| c * shrink).collect();
        let p = OddPolynomial::from_odd(
            &odd,
            2.0,
            Guarantee { region: format!("delta <= |x| <= 2, delta = {delta}"), eps, bound: 1.0 },
        );
        if validate_sign(&p, delta, eps) {
            return Ok(p);
        }
    }
    Err(QsvtError::ConstructionFailed(format!("sign polynomial for delta={delta}, eps={eps}")))
}

type PolyCache = Mutex<HashMap<(u64, u64), Arc<OddPolynomial>>>;

fn cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`sign_poly`].
pub fn sign_poly_cached(delta: f64, eps: f64) -> Result<Arc<OddPolynomial>, QsvtError> {
    let key = (delta.to_bits(), eps.to_bits());
    if let Some(p) = cache().lock().expect("poly cache").get(&key) {
        return Ok(Arc::clone(p));
    }
    let p = Arc::new(sign_poly(delta, eps)?);
    cache().lock().expect("poly cache").insert(key, Arc::clone(&p));
    Ok(p)
}

/// Degree of a sign polynomial valid for `(delta, eps)`.
///
/// Parameters are first rounded down onto a geometric grid (steps of
/// 2^(1/8) in delta, 2^(1/2) in eps) so repeated cost queries hit the cache;
/// a polynomial for smaller parameters also satisfies the original ones.
pub fn sign_poly_degree(delta: f64, eps: f64) -> Result<usize, QsvtError> {
    check_args(delta, eps, "delta")?;
    let dq = (2f64).powf((delta.log2() * 8.0).floor() / 8.0);
    let eq = (2f64).powf((eps.log2() * 2.0).floor() / 2.0);
    Ok(sign_poly_cached(dq.min(delta), eq.min(eps))?.degree())
}

/// Odd polynomial with `|1 - P| <= eps` on `[w, 1]`, `|P| <= eps` on
/// `[-w/3, w/3]` and `|P| <= 1` on `[-1, 1]`, formed as
/// `(Q(x + 2w/3) + Q(x - 2w/3)) / 2` with `Q` a sign polynomial of width `w/3`.
pub fn antisym_step_poly(w: f64, eps: f64) -> Result<OddPolynomial, QsvtError> {
    check_args(w, eps, "w")?;
    let q = sign_poly_cached(w / 3.0, eps)?;
    let shift = 2.0 * w / 3.0;
    let degree = q.degree();
    let nodes = (2 * (degree + 1)).next_power_of_two();
    let coeffs = chebyshev_coefficients(|x| 0.5 * (q.eval(x + shift) + q.eval(x - shift)), nodes, degree + 1);
    let odd: Vec<f64> = coeffs.iter().skip(1).step_by(2).copied().collect();
    let p = OddPolynomial::from_odd(&odd, 1.0, Guarantee { region: format!("step at w = {w}"), eps, bound: 1.0 });
    let ok = grid(-1.0, 1.0, GRID_POINTS).chain([w, 1.0, w / 3.0]).all(|x| {
        let v = p.eval(x);
        let bounded = v.abs() <= 1.0 + 1e-12;
        let top = x.abs() < w || (v - x.signum()).abs() <= eps;
        let mid = x.abs() > w / 3.0 || v.abs() <= eps;
        bounded && top && mid
    });
    if ok {
        Ok(p)
    } else {
        Err(QsvtError::ConstructionFailed(format!("step polynomial for w={w}, eps={eps}")))
    }
}
