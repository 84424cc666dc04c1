//! Elementary symmetric functions, weak log-majorization, and the
//! coefficient identity `e_k(xi) = (n-k)/n * e_k(|z|)` linking a
//! nonnegative-root polynomial to its critical points.

use crate::error::{Error, Result};
use crate::polyzero::Polynomial;
use num_complex::Complex64;
use std::ops::{AddAssign, Mul};

/// Relative slack allowed on each prefix product in majorization checks.
pub const MAJORIZATION_REL_TOL: f64 = 1e-9;

/// Scalars the product recurrence for `e_k` runs over.
pub trait EsfValue: Copy + AddAssign + Mul<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn magnitude(self) -> f64;
}

impl EsfValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl EsfValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// `[e_0, e_1, ..., e_m]`: the coefficients of `prod (1 + v_j t)`, built one
/// factor at a time over the entries sorted by decreasing magnitude.
pub fn esf_all<T: EsfValue>(values: &[T]) -> Vec<T> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.magnitude().total_cmp(&a.magnitude()));
    let mut e = vec![T::zero(); sorted.len() + 1];
    e[0] = T::one();
    for (i, &v) in sorted.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let prev = e[j - 1];
            e[j] += v * prev;
        }
    }
    e
}

/// The `k`-th elementary symmetric function; `e_0 = 1`.
pub fn esf<T: EsfValue>(values: &[T], k: usize) -> Result<T> {
    if k > values.len() {
        return Err(Error::IndexOutOfRange {
            k,
            len: values.len(),
        });
    }
    Ok(esf_all(values)[k])
}

/// One prefix of a weak log-majorization comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrefixComparison {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `prod_{j<=k} a_j` against `prod_{j<=k} b_j` for every `k`,
/// with the products accumulated in log space.
///
/// A zero inside the `a` prefix makes that prefix product 0, which satisfies
/// any comparison; a zero in the `b` prefix alone fails it.
pub fn prefix_products(a: &[f64], b: &[f64]) -> Vec<PrefixComparison> {
    let slack = MAJORIZATION_REL_TOL.ln_1p();
    let mut log_a = 0.0;
    let mut log_b = 0.0;
    let mut a_zero = false;
    let mut b_zero = false;
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&x, &y))| {
            if x == 0.0 {
                a_zero = true;
            } else {
                log_a += x.ln();
            }
            if y == 0.0 {
                b_zero = true;
            } else {
                log_b += y.ln();
            }
            let holds = a_zero || (!b_zero && log_a <= log_b + slack);
            PrefixComparison {
                k: i + 1,
                lhs: if a_zero { 0.0 } else { log_a.exp() },
                rhs: if b_zero { 0.0 } else { log_b.exp() },
                holds,
            }
        })
        .collect()
}

/// True iff `a` is weakly log-majorized by `b` up to [`MAJORIZATION_REL_TOL`].
/// Sequences of different lengths are never comparable.
pub fn weak_log_majorization(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && prefix_products(a, b).iter().all(|c| c.holds)
}

/// Builds `q(z) = prod (z - m_j)` from nonnegative `moduli`, root-finds its
/// critical points `xi`, and returns
/// `max_k |e_k(xi) - (n-k)/n e_k(m)| / max(1, e_k(m))` over `k = 1..n-1`.
pub fn critical_esf_identity_error(moduli: &[f64]) -> Result<f64> {
    let n = moduli.len();
    if n < 2 {
        return Err(Error::TooFewZeros(n));
    }
    if moduli.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
        return Err(Error::NegativeValue);
    }
    let roots: Vec<Complex64> = moduli.iter().map(|&m| Complex64::new(m, 0.0)).collect();
    let xi = Polynomial::from_roots(&roots).derivative()?.monic.roots()?;
    let e_xi = esf_all(&xi);
    let e_m = esf_all(moduli);
    let nf = n as f64;
    Ok((1..n)
        .map(|k| {
            let target = (n - k) as f64 / nf * e_m[k];
            (e_xi[k] - target).norm() / e_m[k].max(1.0)
        })
        .fold(0.0, f64::max))
}
