//! Dense complex linear algebra: the centering projector `Q`, the
//! differentiator `A = Q diag(z) Q`, eigenvalues (Hessenberg + shifted QR),
//! singular values (one-sided Jacobi), and Schatten / `l^p` norms.

use crate::error::{Error, Result};
use crate::polyzero::{CriticalSet, ZeroConfig};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::ops::{Index, IndexMut, Mul};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Jacobi sweep cap.
pub const MAX_JACOBI_SWEEPS: usize = 30;
/// QR iteration cap per unit of matrix order.
pub const QR_ITERS_PER_ORDER: usize = 30;

const PRESCALE_LOW: f64 = 1e-6;
const PRESCALE_HIGH: f64 = 1e6;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a perfect square.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFiniteMatrix);
        }
        Ok(Self { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(n, data)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let max = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        max * self
            .data
            .iter()
            .map(|z| (z / max).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    /// Power-of-two exponent `k` such that `2^k * self` has Frobenius norm
    /// inside the prescale window, or 0 if no rescale is needed.
    fn prescale_exponent(&self) -> i32 {
        let f = self.frobenius_norm();
        if f == 0.0 || (PRESCALE_LOW..=PRESCALE_HIGH).contains(&f) {
            0
        } else {
            -f.log2().round() as i32
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Eigenvalues sorted by nonincreasing modulus, then increasing argument,
/// then original index.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<Complex64>,
}

impl EigenSpectrum {
    fn sorted(values: Vec<Complex64>) -> Self {
        let mut indexed: Vec<(usize, Complex64)> = values.into_iter().enumerate().collect();
        indexed.sort_by(|(ia, a), (ib, b)| {
            b.norm()
                .total_cmp(&a.norm())
                .then(a.arg().total_cmp(&b.arg()))
                .then(ia.cmp(ib))
        });
        Self {
            values: indexed.into_iter().map(|(_, z)| z).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `sum |lambda_i|^p`.
    pub fn power_sum(&self, p: f64) -> f64 {
        crate::polyzero::power_sum(&self.values, p)
    }
}

/// Singular values in nonincreasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    fn sorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `sum sigma_k^p`.
    pub fn power_sum(&self, p: f64) -> f64 {
        self.values.iter().map(|s| s.powf(p)).sum()
    }

    /// Schatten `p`-norm from these singular values.
    pub fn schatten(&self, p: f64) -> Result<f64> {
        validate_exponent(p)?;
        Ok(scaled_lp(self.values.iter().copied(), p))
    }
}

pub(crate) fn validate_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `(sum x^p)^(1/p)` computed relative to the largest entry; `max` for `p = inf`.
fn scaled_lp(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let max = values.clone().fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    max * values.map(|x| (x / max).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `Q = I - J/n`, the orthogonal projection onto the centered subspace.
pub fn projector_q(n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let inv = 1.0 / n as f64;
    let mut q = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = Complex64::new(if i == j { 1.0 - inv } else { -inv }, 0.0);
        }
    }
    Ok(q)
}

/// `A = Q diag(z) Q`, assembled entrywise as
/// `A_ij = delta_ij z_i - (z_i + z_j)/n + (sum z)/n^2`.
pub fn differentiator(cfg: &ZeroConfig) -> CMatrix {
    differentiator_of(cfg.zeros())
}

pub(crate) fn differentiator_of(z: &[Complex64]) -> CMatrix {
    let n = z.len();
    let nf = n as f64;
    let mean_term = z.iter().sum::<Complex64>() / (nf * nf);
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut v = mean_term - (z[i] + z[j]) / nf;
            if i == j {
                v += z[i];
            }
            a[(i, j)] = v;
        }
    }
    a
}

/// All eigenvalues, by Householder reduction to Hessenberg form followed by
/// single-shift complex QR with Wilkinson shifts.
pub fn eigenvalues(m: &CMatrix) -> Result<EigenSpectrum> {
    if !m.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let n = m.n;
    if n == 0 {
        return Ok(EigenSpectrum { values: Vec::new() });
    }
    let k = m.prescale_exponent();
    let factor = 2f64.powi(k);
    let mut h = if k == 0 {
        m.clone()
    } else {
        m.scale(Complex64::new(factor, 0.0))
    };
    reduce_to_hessenberg(&mut h);
    let mut values = hessenberg_qr(&mut h)?;
    if k != 0 {
        let back = 2f64.powi(-k);
        values.iter_mut().for_each(|z| *z *= back);
    }
    Ok(EigenSpectrum::sorted(values))
}

fn reduce_to_hessenberg(h: &mut CMatrix) {
    let n = h.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for i in k + 1..n {
            v[i] /= vnorm;
        }
        // Left: H <- (I - 2 v v*) H on rows k+1..n.
        for j in k..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= 2.0 * v[i] * dot;
            }
        }
        // Right: H <- H (I - 2 v v*) on columns k+1..n.
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            for j in k + 1..n {
                h[(i, j)] -= 2.0 * dot * v[j].conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let an = a.norm();
    let r = an.hypot(b.norm());
    (an / r, (a / an) * b.conj() / r)
}

fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    (half_tr + disc, half_tr - disc)
}

fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.n;
    let max_iters = QR_ITERS_PER_ORDER * n;
    let mut values = vec![ZERO; n];
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo, lo)].l1_norm() + h[(lo - 1, lo - 1)].l1_norm();
            if s == 0.0 {
                s = (lo.saturating_sub(1)..=hi)
                    .map(|i| h[(i, i)].l1_norm())
                    .sum::<f64>()
                    .max(f64::MIN_POSITIVE);
            }
            if h[(lo, lo - 1)].l1_norm() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig2x2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            values[lo] = l1;
            values[hi] = l2;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            since_deflation = 0;
            continue;
        }

        if total >= max_iters {
            return Err(Error::EigenDidNotConverge { iterations: total });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].l1_norm()
        } else {
            let d = h[(hi, hi)];
            let (l1, l2) = eig2x2(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], d);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        rots.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((c, s));
        }
        for (offset, &(c, s)) in rots.iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(values)
}

/// Singular values by one-sided (Hestenes) Jacobi on the columns of `m`.
pub fn singular_values(m: &CMatrix) -> Result<SingularSpectrum> {
    if !m.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let n = m.n;
    let k = m.prescale_exponent();
    let factor = 2f64.powi(k);
    // Column-major working copy.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)] * factor).collect())
        .collect();

    let fro = {
        let s: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
        s.sqrt()
    };
    let rel_tol = (n as f64).sqrt() * f64::EPSILON;
    // Inner products below this are rounding noise against the whole matrix.
    let abs_floor = n as f64 * (f64::EPSILON * fro).powi(2);

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (ci, cj) = {
                    let (left, right) = cols.split_at_mut(j);
                    (&mut left[i], &mut right[0])
                };
                let alpha: f64 = ci.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cj.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = ci.iter().zip(cj.iter()).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= abs_floor || g <= rel_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
                    let x = *a;
                    let y = *b * phase.conj();
                    *a = x * c - y * s;
                    *b = x * s + y * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdDidNotConverge {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }
    let back = 2f64.powi(-k);
    let values = cols
        .iter()
        .map(|c| scaled_lp(c.iter().map(|z| z.norm()), 2.0) * back)
        .collect();
    Ok(SingularSpectrum::sorted(values))
}

/// Schatten `p`-norm; `p = f64::INFINITY` gives the spectral norm.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    validate_exponent(p)?;
    singular_values(m)?.schatten(p)
}

/// `l^p` norm of a complex vector; `p = f64::INFINITY` gives the max modulus.
pub fn lp_norm(v: &[Complex64], p: f64) -> Result<f64> {
    validate_exponent(p)?;
    Ok(scaled_lp(v.iter().map(|z| z.norm()), p))
}

/// Critical points as the spectrum of the differentiator with the
/// minimum-modulus eigenvalue (the structural zero) removed.
pub fn critical_points_spectral(cfg: &ZeroConfig) -> Result<CriticalSet> {
    let spec = eigenvalues(&differentiator(cfg))?;
    Ok(critical_from_spectrum(&spec))
}

pub(crate) fn critical_from_spectrum(spec: &EigenSpectrum) -> CriticalSet {
    let mut values = spec.values().to_vec();
    values.pop();
    CriticalSet::new(values)
}

/// Orders complex values by modulus descending, then argument.
pub fn cmp_by_modulus(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg()))
}
