//! Polynomials built from their zeros, differentiation, and the
//! root-finding route to critical points.
//!
//! Coefficient vectors are stored in descending powers with an exact
//! leading `1`, so `coeffs[j]` is the coefficient of `z^(n-j)`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// Tolerance on `|sum z_j| / max(1, max |z_j|)` for a configuration to count as centered.
pub const CENTER_TOL: f64 = 1e-12;
/// Residual tolerance of the root finder, relative to the rescaled coefficient size.
pub const ROOT_TOL: f64 = 1e-13;
/// Iteration cap of the root finder.
pub const ROOT_MAX_ITERS: usize = 200;

const POLISH_MAX_SWEEPS: usize = 60;

const INIT_ANGLE_OFFSET: f64 = 0.4;

/// A multiset of `n >= 2` finite complex zeros.
///
/// The `centered` flag is set whenever the centroid vanishes up to
/// [`CENTER_TOL`]; it is computed on construction and never set by hand.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroConfig {
    zeros: Vec<Complex64>,
    centered: bool,
}

impl ZeroConfig {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        if zeros.len() < 2 {
            return Err(Error::TooFewZeros(zeros.len()));
        }
        if let Some((index, &value)) = zeros.iter().enumerate().find(|(_, z)| !z.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let centered = centering_residual(&zeros) <= CENTER_TOL;
        Ok(Self { zeros, centered })
    }

    /// Configuration with all zeros on the real axis.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn n(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// `max(1, max |z_j|)`, the scale used by every relative tolerance on zeros.
    pub fn tolerance_scale(&self) -> f64 {
        self.zeros.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    pub fn centroid(&self) -> Complex64 {
        self.zeros.iter().sum::<Complex64>() / self.n() as f64
    }

    /// Shifts every zero by minus the centroid.
    ///
    /// A second pass removes the rounding residual left by the first, which
    /// matters when the zeros sit far from the origin.
    pub fn center(&self) -> ZeroConfig {
        let mut zeros = self.zeros.clone();
        for _ in 0..2 {
            let c = zeros.iter().sum::<Complex64>() / zeros.len() as f64;
            zeros.iter_mut().for_each(|z| *z -= c);
        }
        let centered = centering_residual(&zeros) <= CENTER_TOL;
        ZeroConfig { zeros, centered }
    }

    pub fn require_centered(&self) -> Result<()> {
        if self.centered {
            Ok(())
        } else {
            Err(Error::NotCentered {
                residual: self.zeros.iter().sum::<Complex64>().norm(),
            })
        }
    }

    /// Multiplies every zero by `c`.
    pub fn scaled(&self, c: Complex64) -> Result<ZeroConfig> {
        ZeroConfig::new(self.zeros.iter().map(|z| z * c).collect())
    }

    /// `sum |z_j|^p`.
    pub fn power_sum(&self, p: f64) -> f64 {
        power_sum(&self.zeros, p)
    }
}

fn centering_residual(zeros: &[Complex64]) -> f64 {
    let scale = zeros.iter().map(|z| z.norm()).fold(1.0, f64::max);
    zeros.iter().sum::<Complex64>().norm() / scale
}

pub(crate) fn power_sum(values: &[Complex64], p: f64) -> f64 {
    values.iter().map(|z| z.norm().powf(p)).sum()
}

impl Serialize for ZeroConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serial::serialize_complex_list(&self.zeros, serializer)
    }
}

impl<'de> Deserialize<'de> for ZeroConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        ZeroConfig::new(pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// The critical points of a polynomial, i.e. the zeros of its derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    points: Vec<Complex64>,
}

impl CriticalSet {
    pub(crate) fn new(points: Vec<Complex64>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sum |w_k|^p`.
    pub fn power_sum(&self, p: f64) -> f64 {
        power_sum(&self.points, p)
    }
}

/// A monic polynomial `z^n + a_1 z^(n-1) + ... + a_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

/// `p'(z) = leading * monic(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivative {
    pub monic: Polynomial,
    pub leading: f64,
}

impl Polynomial {
    /// Builds a polynomial from descending coefficients whose first entry must be exactly 1.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.first() {
            Some(c) if *c == Complex64::new(1.0, 0.0) => {}
            _ => return Err(Error::NotMonic),
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NotMonic);
        }
        Ok(Self { coeffs })
    }

    /// `prod_j (z - r_j)`, expanded by balanced pairing of the linear factors.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        Self {
            coeffs: balanced_product(roots),
        }
    }

    pub fn from_config(cfg: &ZeroConfig) -> Self {
        Self::from_roots(cfg.zeros())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Differentiates and divides by the degree so the result stays monic.
    pub fn derivative(&self) -> Result<Derivative> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::DegreeTooLow { degree: 0, needed: 1 });
        }
        let nf = n as f64;
        let coeffs = self.coeffs[..n]
            .iter()
            .enumerate()
            .map(|(j, &a)| if j == 0 { a } else { a * ((n - j) as f64 / nf) })
            .collect();
        Ok(Derivative {
            monic: Polynomial { coeffs },
            leading: nf,
        })
    }

    /// All `n` roots with multiplicity, by Aberth–Ehrlich iteration.
    ///
    /// Exact zero trailing coefficients are deflated first, so roots at the
    /// origin come back as exact zeros.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::DegreeTooLow { degree: 0, needed: 1 });
        }
        let trailing = self
            .coeffs
            .iter()
            .rev()
            .take_while(|c| **c == Complex64::new(0.0, 0.0))
            .count();
        let mut roots = vec![Complex64::new(0.0, 0.0); trailing];
        roots.extend(aberth(&self.coeffs[..=n - trailing])?);
        Ok(roots)
    }
}

fn balanced_product(roots: &[Complex64]) -> Vec<Complex64> {
    match roots.len() {
        0 => vec![Complex64::new(1.0, 0.0)],
        1 => vec![Complex64::new(1.0, 0.0), -roots[0]],
        len => {
            let (left, right) = roots.split_at(len / 2);
            convolve(&balanced_product(left), &balanced_product(right))
        }
    }
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation of value, derivative, and the running rounding-error
/// scale `sum |c_j| |z|^(n-j)`.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let zabs = z.norm();
    let mut value = coeffs[0];
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut absum = coeffs[0].norm();
    for &c in &coeffs[1..] {
        deriv = deriv * z + value;
        value = value * z + c;
        absum = absum * zabs + c.norm();
    }
    (value, deriv, absum)
}

/// One Gauss–Seidel Aberth sweep with value and derivative from `eval`; returns the
/// largest step relative to its root.
fn aberth_sweep(u: &mut [Complex64], eval: impl Fn(Complex64) -> (Complex64, Complex64)) -> f64 {
    let n = u.len();
    let mut largest = 0.0_f64;
    for k in 0..n {
        let (v, deriv) = eval(u[k]);
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        if deriv == Complex64::new(0.0, 0.0) {
            u[k] *= Complex64::from_polar(1.0 + 1e-3, 1.0);
            largest = f64::INFINITY;
            continue;
        }
        let newton = v / deriv;
        let repulsion: Complex64 = (0..n)
            .filter(|&j| j != k)
            .map(|j| u[k] - u[j])
            .filter(|d| *d != Complex64::new(0.0, 0.0))
            .map(|d| d.inv())
            .sum();
        let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
        if !step.is_finite() {
            u[k] *= Complex64::from_polar(1.0 + 1e-3, 1.0);
            largest = f64::INFINITY;
            continue;
        }
        u[k] -= step;
        largest = largest.max(step.norm() / u[k].norm().max(f64::MIN_POSITIVE));
    }
    largest
}

/// Double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        Dd::renormalized(s, err + self.lo + o.lo)
    }

    fn mul(self, b: f64) -> Dd {
        let p = self.hi * b;
        let err = self.hi.mul_add(b, -p);
        Dd::renormalized(p, err + self.lo * b)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn renormalized(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }
}

#[derive(Clone, Copy)]
struct DdComplex {
    re: Dd,
    im: Dd,
}

impl DdComplex {
    fn new(z: Complex64) -> Self {
        DdComplex { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    /// `self * z + c`.
    fn mul_add(self, z: Complex64, c: DdComplex) -> Self {
        DdComplex {
            re: self.re.mul(z.re).add(self.im.mul(z.im).neg()).add(c.re),
            im: self.re.mul(z.im).add(self.im.mul(z.re)).add(c.im),
        }
    }

    fn round(self) -> Complex64 {
        Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}

/// Horner value and derivative of `p` at `z` accumulated in double-double.
fn horner_compensated(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = DdComplex::new(coeffs[0]);
    let mut deriv = DdComplex::new(Complex64::new(0.0, 0.0));
    for &c in &coeffs[1..] {
        deriv = deriv.mul_add(z, value);
        value = value.mul_add(z, DdComplex::new(c));
    }
    (value.round(), deriv.round())
}

fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-coeffs[1]]),
        _ => {}
    }

    // z = s u keeps the iterates O(1). A power of two makes the rescaled
    // coefficients exact, which matters for multiple roots.
    let bound = coeffs[1..]
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm().powf(1.0 / (j + 1) as f64))
        .fold(1.0, f64::max);
    let s = 2f64.powi(bound.log2().round() as i32);
    let mut scaled = Vec::with_capacity(n + 1);
    let mut sj = 1.0;
    for &c in coeffs {
        scaled.push(c / sj);
        sj *= s;
    }
    let scale = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = 1.0 + scaled[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);

    let mut u: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / n as f64 + INIT_ANGLE_OFFSET;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    let noise_factor = 4.0 * n as f64 * f64::EPSILON;
    let mut iterations = 0;

    // All roots are updated every sweep until every residual is at rounding
    // level simultaneously; freezing roots one at a time leaves clusters
    // around multiple roots lopsided.
    while iterations < ROOT_MAX_ITERS {
        let settled = u.iter().all(|&x| {
            let (value, _, absum) = horner(&scaled, x);
            value.norm() <= noise_factor * absum
        });
        if settled {
            break;
        }
        iterations += 1;
        aberth_sweep(&mut u, |x| {
            let (v, d, _) = horner(&scaled, x);
            (v, d)
        });
    }

    // At that point each residual is pure rounding noise, so close roots are
    // only mutually consistent to that noise. Sweeps evaluated in
    // double-double refine them until the steps drop below f64 resolution.
    for _ in 0..POLISH_MAX_SWEEPS {
        let largest = aberth_sweep(&mut u, |x| horner_compensated(&scaled, x));
        if largest <= 4.0 * f64::EPSILON {
            break;
        }
    }

    let mut worst = 0.0_f64;
    let mut ok = true;
    for &x in &u {
        let (value, _, absum) = horner(&scaled, x);
        let r = value.norm();
        worst = worst.max(r);
        if r > (ROOT_TOL * scale).max(noise_factor * absum) {
            ok = false;
        }
    }
    let roots: Vec<Complex64> = u.iter().map(|x| x * s).collect();
    if ok {
        Ok(roots)
    } else {
        Err(Error::RootsDidNotConverge {
            iterations,
            residual: worst,
            best: roots,
        })
    }
}

/// Critical points by expanding `p`, differentiating, and root-finding `p'`.
pub fn critical_points_direct(cfg: &ZeroConfig) -> Result<CriticalSet> {
    let d = Polynomial::from_config(cfg).derivative()?;
    Ok(CriticalSet::new(d.monic.roots()?))
}

/// Largest pairwise distance under the matching of `a` onto `b` that
/// minimises the total distance (Hungarian algorithm).
///
/// Returns `f64::INFINITY` when the lengths differ.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let cost = |i: usize, j: usize| (a[i] - b[j]).norm();

    // 1-based potentials formulation; row 0 / column 0 are sentinels.
    let mut row_pot = vec![0.0; n + 1];
    let mut col_pot = vec![0.0; n + 1];
    let mut col_match = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        col_match[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_match[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - row_pot[i0] - col_pot[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    row_pot[col_match[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_match[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_match[j0] = col_match[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n)
        .map(|j| cost(col_match[j] - 1, j - 1))
        .fold(0.0, f64::max)
}
