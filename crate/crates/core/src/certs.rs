//! Every inequality of the theory as an evaluated certificate carrying
//! both sides, their gap, and a verdict under explicit tolerances.
//!
//! All certificates on one configuration share a single [`Analysis`]: the
//! differentiator `A = Q diag(z) Q`, its eigenvalues, its singular values,
//! and the critical points read off the spectrum.

use crate::densela::{
    critical_from_spectrum, differentiator, eigenvalues, lp_norm, singular_values,
    validate_exponent, CMatrix, EigenSpectrum, SingularSpectrum,
};
use crate::error::{Error, Result};
use crate::polyzero::{critical_points_direct, CriticalSet, ZeroConfig};
use crate::serial::{f64_17, opt_f64_17};
use crate::symfun::{esf_all, prefix_products};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const ABS_TOL: f64 = 1e-12;
pub const REL_TOL: f64 = 1e-9;

/// Absolute and relative slack granted to every certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: ABS_TOL,
            rel: REL_TOL,
        }
    }
}

impl Tolerance {
    pub fn margin(&self, lhs: f64, rhs: f64) -> f64 {
        self.abs.max(self.rel * lhs.abs().max(rhs.abs()))
    }
}

/// One evaluated inequality `lhs <= rhs` (or identity `lhs = rhs`).
///
/// `slack` and `ratio` are derived from `lhs` and `rhs` on construction and
/// on deserialization; `ratio` is absent when `rhs <= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "CertificateRecord")]
pub struct Certificate {
    name: String,
    n: usize,
    #[serde(serialize_with = "opt_f64_17")]
    p: Option<f64>,
    #[serde(serialize_with = "f64_17")]
    lhs: f64,
    #[serde(serialize_with = "f64_17")]
    rhs: f64,
    #[serde(serialize_with = "f64_17")]
    slack: f64,
    #[serde(serialize_with = "opt_f64_17")]
    ratio: Option<f64>,
    holds: bool,
}

#[derive(Deserialize)]
struct CertificateRecord {
    name: String,
    n: usize,
    p: Option<f64>,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

impl From<CertificateRecord> for Certificate {
    fn from(r: CertificateRecord) -> Self {
        Certificate::with_verdict(r.name, r.n, r.p, r.lhs, r.rhs, r.holds)
    }
}

impl Certificate {
    /// `lhs <= rhs` up to the tolerance margin.
    pub fn bound(name: impl Into<String>, n: usize, p: Option<f64>, lhs: f64, rhs: f64, tol: Tolerance) -> Self {
        let holds = lhs <= rhs + tol.margin(lhs, rhs);
        Self::with_verdict(name.into(), n, p, lhs, rhs, holds)
    }

    /// `lhs = rhs` up to the tolerance margin, in both directions.
    pub fn equality(name: impl Into<String>, n: usize, p: Option<f64>, lhs: f64, rhs: f64, tol: Tolerance) -> Self {
        let holds = (lhs - rhs).abs() <= tol.margin(lhs, rhs);
        Self::with_verdict(name.into(), n, p, lhs, rhs, holds)
    }

    pub(crate) fn with_verdict(name: String, n: usize, p: Option<f64>, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self {
            name,
            n,
            p,
            lhs,
            rhs,
            slack: rhs - lhs,
            ratio: (rhs > 0.0).then(|| lhs / rhs),
            holds,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> Option<f64> {
        self.p
    }
    pub fn lhs(&self) -> f64 {
        self.lhs
    }
    pub fn rhs(&self) -> f64 {
        self.rhs
    }
    pub fn slack(&self) -> f64 {
        self.slack
    }
    pub fn ratio(&self) -> Option<f64> {
        self.ratio
    }
    pub fn holds(&self) -> bool {
        self.holds
    }

    /// `|lhs - rhs|`, distinguishing near-equality from genuine slack.
    pub fn gap(&self) -> f64 {
        self.slack.abs()
    }

    /// `name` or `name@p=<p>`, the key audits aggregate by.
    pub fn key(&self) -> String {
        match self.p {
            Some(p) => format!("{}@p={}", self.name, p),
            None => self.name.clone(),
        }
    }
}

/// `C(n, p)`: `(n-2)/n` for `p >= 2`, `((n-2)/n)^(p/2)` for `1 <= p < 2`.
pub fn schoenberg_constant(n: usize, p: f64) -> f64 {
    let base = (n as f64 - 2.0) / n as f64;
    if p >= 2.0 {
        base
    } else {
        base.powf(p / 2.0)
    }
}

/// `c(n, p) = ((n-2)/n)^min(1/p, 1/2)`, the operator-norm bound of
/// `z -> Q diag(z) Q` from centered `l^p` to the Schatten class `S_p`.
pub fn interpolation_constant(n: usize, p: f64) -> f64 {
    let base = (n as f64 - 2.0) / n as f64;
    base.powf((1.0 / p).min(0.5))
}

/// Pereira's constant `(n-1)/n`.
pub fn pereira_constant(n: usize) -> f64 {
    (n as f64 - 1.0) / n as f64
}

/// Spectral data of one configuration, shared by all its certificates.
#[derive(Clone, Debug)]
pub struct Analysis {
    cfg: ZeroConfig,
    matrix: CMatrix,
    eigen: EigenSpectrum,
    singular: SingularSpectrum,
    critical: CriticalSet,
}

impl Analysis {
    pub fn new(cfg: &ZeroConfig) -> Result<Self> {
        let matrix = differentiator(cfg);
        let eigen = eigenvalues(&matrix)?;
        let singular = singular_values(&matrix)?;
        let critical = critical_from_spectrum(&eigen);
        Ok(Self {
            cfg: cfg.clone(),
            matrix,
            eigen,
            singular,
            critical,
        })
    }

    pub fn config(&self) -> &ZeroConfig {
        &self.cfg
    }
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
    pub fn eigen(&self) -> &EigenSpectrum {
        &self.eigen
    }
    pub fn singular(&self) -> &SingularSpectrum {
        &self.singular
    }
    pub fn critical(&self) -> &CriticalSet {
        &self.critical
    }

    fn n(&self) -> usize {
        self.cfg.n()
    }

    /// The order-p bound `sum |w|^p <= factor * C(n,p) * sum |z|^p`.
    pub fn schoenberg(&self, p: f64, tol: Tolerance, factor: f64) -> Result<Certificate> {
        self.cfg.require_centered()?;
        validate_exponent(p)?;
        Ok(schoenberg_from(&self.critical, &self.cfg, p, tol, factor))
    }

    /// `||A||_{S_p} <= c(n,p) ||z||_p`, the link the interpolation argument supplies.
    pub fn interpolation(&self, p: f64, tol: Tolerance) -> Result<Certificate> {
        self.cfg.require_centered()?;
        let lhs = self.singular.schatten(p)?;
        let rhs = interpolation_constant(self.n(), p) * lp_norm(self.cfg.zeros(), p)?;
        Ok(Certificate::bound("interpolation", self.n(), Some(p), lhs, rhs, tol))
    }

    /// `sum |lambda|^p <= sum sigma^p` on the differentiator.
    pub fn weyl(&self, p: f64, tol: Tolerance) -> Result<Certificate> {
        validate_exponent(p)?;
        Ok(Certificate::bound(
            "weyl",
            self.n(),
            Some(p),
            self.eigen.power_sum(p),
            self.singular.power_sum(p),
            tol,
        ))
    }

    pub fn pereira(&self, p: f64, tol: Tolerance) -> Result<Certificate> {
        validate_exponent(p)?;
        Ok(pereira_from(&self.critical, &self.cfg, p, tol))
    }

    pub fn quartic(&self, tol: Tolerance) -> Result<[Certificate; 3]> {
        self.cfg.require_centered()?;
        let n = self.n();
        let nf = n as f64;
        let z = self.cfg.zeros();
        let lhs = self.critical.power_sum(4.0);
        let s4 = self.cfg.power_sum(4.0);
        let s2 = self.cfg.power_sum(2.0);
        let square_sum = z.iter().map(|w| w * w).sum::<Complex64>().norm_sqr();
        let lead = (nf - 4.0) / nf * s4;
        let dbs = lead + 2.0 / (nf * nf) * s2 * s2;
        let kt = lead + (s2 * s2 + square_sum) / (nf * nf);
        Ok([
            Certificate::bound("quartic_dbs", n, Some(4.0), lhs, dbs, tol),
            Certificate::bound("quartic_kt", n, Some(4.0), lhs, kt, tol),
            Certificate::bound("quartic_kt_vs_dbs", n, Some(4.0), kt, dbs, tol),
        ])
    }

    /// The `S_inf` contraction, the `S_2` identity, and the `S_1` bound.
    pub fn endpoints(&self, tol: Tolerance) -> Result<[Certificate; 3]> {
        self.cfg.require_centered()?;
        let n = self.n();
        let base = (n as f64 - 2.0) / n as f64;
        let z = self.cfg.zeros();
        Ok([
            Certificate::bound(
                "endpoint_s1",
                n,
                Some(1.0),
                self.singular.power_sum(1.0),
                base.sqrt() * lp_norm(z, 1.0)?,
                tol,
            ),
            Certificate::equality(
                "endpoint_s2_identity",
                n,
                Some(2.0),
                self.singular.power_sum(2.0),
                base * self.cfg.power_sum(2.0),
                tol,
            ),
            Certificate::bound(
                "endpoint_sinf",
                n,
                None,
                self.singular.largest(),
                lp_norm(z, f64::INFINITY)?,
                tol,
            ),
        ])
    }

    /// `e_k(sigma_1..sigma_{n-1}) <= (n-k)/n e_k(|z|)` for `k = 1..n-1`.
    pub fn esf_bounds(&self, tol: Tolerance) -> Vec<Certificate> {
        let n = self.n();
        let top = &self.singular.values()[..n - 1];
        let moduli: Vec<f64> = self.cfg.zeros().iter().map(|z| z.norm()).collect();
        let e_sigma = esf_all(top);
        let e_z = esf_all(&moduli);
        (1..n)
            .map(|k| {
                let rhs = (n - k) as f64 / n as f64 * e_z[k];
                Certificate::bound(format!("esf_k{k:02}"), n, None, e_sigma[k], rhs, tol)
            })
            .collect()
    }
}

fn schoenberg_from(critical: &CriticalSet, cfg: &ZeroConfig, p: f64, tol: Tolerance, factor: f64) -> Certificate {
    let n = cfg.n();
    let rhs = factor * schoenberg_constant(n, p) * cfg.power_sum(p);
    Certificate::bound("schoenberg", n, Some(p), critical.power_sum(p), rhs, tol)
}

fn pereira_from(critical: &CriticalSet, cfg: &ZeroConfig, p: f64, tol: Tolerance) -> Certificate {
    let n = cfg.n();
    let rhs = pereira_constant(n) * cfg.power_sum(p);
    Certificate::bound("pereira", n, Some(p), critical.power_sum(p), rhs, tol)
}

/// `sum |w_k|^p <= C(n,p) sum |z_j|^p` for a centered configuration, with the
/// critical points taken from the differentiator spectrum.
pub fn schoenberg_order_p(cfg: &ZeroConfig, p: f64) -> Result<Certificate> {
    cfg.require_centered()?;
    validate_exponent(p)?;
    Analysis::new(cfg)?.schoenberg(p, Tolerance::default(), 1.0)
}

/// Same certificate with the critical points from the root-finding route.
pub fn schoenberg_order_p_direct(cfg: &ZeroConfig, p: f64) -> Result<Certificate> {
    cfg.require_centered()?;
    validate_exponent(p)?;
    let w = critical_points_direct(cfg)?;
    Ok(schoenberg_from(&w, cfg, p, Tolerance::default(), 1.0))
}

/// de Bruin–Sharma, Kushel–Tyaglov, and the dominance of the latter's
/// right-hand side by the former's.
pub fn quartic_bounds(cfg: &ZeroConfig) -> Result<[Certificate; 3]> {
    cfg.require_centered()?;
    Analysis::new(cfg)?.quartic(Tolerance::default())
}

/// `sum |w|^p <= (n-1)/n sum |z|^p`, valid without centering.
pub fn pereira_bound(cfg: &ZeroConfig, p: f64) -> Result<Certificate> {
    validate_exponent(p)?;
    let w = if cfg.is_centered() {
        Analysis::new(cfg)?.critical
    } else {
        critical_points_direct(cfg)?
    };
    Ok(pereira_from(&w, cfg, p, Tolerance::default()))
}

/// Weyl's majorant `sum |lambda_i|^p <= sum sigma_i^p` on any square matrix.
pub fn weyl_check(m: &CMatrix, p: f64) -> Result<Certificate> {
    validate_exponent(p)?;
    let lhs = eigenvalues(m)?.power_sum(p);
    let rhs = singular_values(m)?.power_sum(p);
    Ok(Certificate::bound("weyl", m.order(), Some(p), lhs, rhs, Tolerance::default()))
}

pub fn endpoint_checks(cfg: &ZeroConfig) -> Result<[Certificate; 3]> {
    cfg.require_centered()?;
    Analysis::new(cfg)?.endpoints(Tolerance::default())
}

/// Elementary-symmetric bounds on the singular values; no centering needed.
pub fn esf_bounds(cfg: &ZeroConfig) -> Result<Vec<Certificate>> {
    Ok(Analysis::new(cfg)?.esf_bounds(Tolerance::default()))
}

/// Prefix products of the singular values of `X* D X` against those of
/// `X* |D| X`, one certificate per `k`, judged in log space.
pub fn sv_product_check(x: &CMatrix, d: &[Complex64]) -> Result<Vec<Certificate>> {
    let n = x.order();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: d.len(),
        });
    }
    let xa = x.adjoint();
    let signed = &(&xa * &CMatrix::from_diag(d)) * x;
    let moduli: Vec<Complex64> = d.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let absolute = &(&xa * &CMatrix::from_diag(&moduli)) * x;
    let a = singular_values(&signed)?;
    let b = singular_values(&absolute)?;
    Ok(prefix_products(a.values(), b.values())
        .into_iter()
        .map(|c| Certificate::with_verdict(format!("sv_product_k{:02}", c.k), n, None, c.lhs, c.rhs, c.holds))
        .collect())
}

/// A certificate group that could not be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertFailure {
    pub name: String,
    #[serde(serialize_with = "opt_f64_17")]
    pub p: Option<f64>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckOutcome {
    pub certificates: Vec<Certificate>,
    pub failures: Vec<CertFailure>,
}

impl CheckOutcome {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty() && self.certificates.iter().all(Certificate::holds)
    }
}

/// Knobs for [`check_all_with`]; `schoenberg_factor` multiplies `C(n,p)` and
/// exists so audits can verify that they detect a broken constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tolerance: Tolerance,
    pub schoenberg_factor: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::default(),
            schoenberg_factor: 1.0,
        }
    }
}

/// Every applicable certificate on a centered configuration, sorted by `(name, p)`.
pub fn check_all(cfg: &ZeroConfig, p_list: &[f64]) -> Result<CheckOutcome> {
    check_all_with(cfg, p_list, CheckOptions::default())
}

pub fn check_all_with(cfg: &ZeroConfig, p_list: &[f64], opts: CheckOptions) -> Result<CheckOutcome> {
    cfg.require_centered()?;
    let mut out = CheckOutcome::default();
    let analysis = match Analysis::new(cfg) {
        Ok(a) => a,
        Err(e) => {
            out.failures.push(CertFailure {
                name: "analysis".into(),
                p: None,
                message: e.to_string(),
            });
            return Ok(out);
        }
    };
    let tol = opts.tolerance;
    let mut record = |name: &str, p: Option<f64>, r: Result<Vec<Certificate>>| match r {
        Ok(certs) => out.certificates.extend(certs),
        Err(e) => out.failures.push(CertFailure {
            name: name.into(),
            p,
            message: e.to_string(),
        }),
    };
    for &p in p_list {
        record("schoenberg", Some(p), analysis.schoenberg(p, tol, opts.schoenberg_factor).map(|c| vec![c]));
        record("interpolation", Some(p), analysis.interpolation(p, tol).map(|c| vec![c]));
        record("weyl", Some(p), analysis.weyl(p, tol).map(|c| vec![c]));
        record("pereira", Some(p), analysis.pereira(p, tol).map(|c| vec![c]));
    }
    record("quartic", Some(4.0), analysis.quartic(tol).map(Vec::from));
    record("endpoint", None, analysis.endpoints(tol).map(Vec::from));
    record("esf", None, Ok(analysis.esf_bounds(tol)));

    out.certificates.sort_by(|a, b| {
        a.name.cmp(&b.name).then_with(|| match (a.p, b.p) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (x, y) => x.is_some().cmp(&y.is_some()),
        })
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[f64]) -> ZeroConfig {
        ZeroConfig::from_real(v).unwrap()
    }

    fn roots4() -> ZeroConfig {
        ZeroConfig::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ])
        .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn constants() {
        close(schoenberg_constant(4, 3.0), 0.5, 0.0);
        close(schoenberg_constant(3, 1.0), (1.0f64 / 3.0).sqrt(), 1e-16);
        close(schoenberg_constant(5, 2.0), 0.6, 1e-16);
        close(interpolation_constant(4, 4.0), 0.5f64.powf(0.25), 1e-16);
        close(interpolation_constant(3, 1.5), (1.0f64 / 3.0).sqrt(), 1e-16);
        assert_eq!(interpolation_constant(6, f64::INFINITY), 1.0);
        assert_eq!(schoenberg_constant(2, 1.3), 0.0);
    }

    #[test]
    fn certificate_verdicts() {
        let t = Tolerance::default();
        assert!(Certificate::bound("x", 3, None, 1.0, 1.0 - 5e-10, t).holds());
        assert!(!Certificate::bound("x", 3, None, 1.0, 1.0 - 2e-9, t).holds());
        assert!(Certificate::bound("x", 3, None, 1e-13, 0.0, t).holds());
        assert!(!Certificate::equality("x", 3, None, 0.5, 1.0, t).holds());
        let c = Certificate::bound("x", 3, Some(2.0), 0.0, 0.0, t);
        assert!(c.holds() && c.ratio().is_none());
        assert_eq!(Certificate::bound("x", 3, None, 1.0, 4.0, t).ratio(), Some(0.25));
    }

    #[test]
    fn schoenberg_examples() {
        let c = schoenberg_order_p(&cfg(&[0.0, 1.0, -1.0]), 1.0).unwrap();
        close(c.lhs(), 2.0 / 3f64.sqrt(), 1e-14);
        close(c.rhs(), 2.0 / 3f64.sqrt(), 1e-15);
        assert!(c.holds());

        let c = schoenberg_order_p(&cfg(&[1.0, -1.0, 1.0, -1.0]), 3.0).unwrap();
        close(c.lhs(), 2.0, 1e-13);
        close(c.rhs(), 2.0, 0.0);
        assert!(c.holds());

        let c = schoenberg_order_p(&roots4(), 2.0).unwrap();
        close(c.lhs(), 0.0, 1e-9);
        close(c.rhs(), 2.0, 1e-15);
        close(c.slack(), 2.0, 1e-9);

        assert!(matches!(schoenberg_order_p(&cfg(&[1.0, 2.0]), 2.0), Err(Error::NotCentered { .. })));
        assert!(matches!(schoenberg_order_p(&cfg(&[1.0, -1.0]), 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn n2_is_vacuously_tight() {
        let c = schoenberg_order_p(&cfg(&[1.0, -1.0]), 1.5).unwrap();
        assert_eq!(c.rhs(), 0.0);
        assert!(c.holds());
        assert!(c.ratio().is_none());
    }

    #[test]
    fn quartic_examples() {
        let [dbs, kt, dom] = quartic_bounds(&cfg(&[0.0, 1.0, -1.0])).unwrap();
        close(dbs.lhs(), 2.0 / 9.0, 1e-14);
        close(dbs.rhs(), 2.0 / 9.0, 1e-15);
        close(kt.rhs(), 2.0 / 9.0, 1e-15);
        assert!(dbs.holds() && kt.holds() && dom.holds());

        let [dbs, kt, dom] = quartic_bounds(&roots4()).unwrap();
        close(kt.lhs(), 0.0, 1e-9);
        close(kt.rhs(), 1.0, 1e-15);
        close(dbs.rhs(), 2.0, 1e-15);
        assert_eq!((dom.lhs(), dom.rhs()), (kt.rhs(), dbs.rhs()));

        let [dbs, kt, _] = quartic_bounds(&cfg(&[1.0, -1.0, 1.0, -1.0])).unwrap();
        close(dbs.lhs(), 2.0, 1e-13);
        close(dbs.rhs(), 2.0, 1e-15);
        close(kt.rhs(), 2.0, 1e-15);
        assert!(dbs.holds() && kt.holds());
    }

    #[test]
    fn pereira_examples() {
        let c = pereira_bound(&cfg(&[1.0, -1.0]), 2.0).unwrap();
        close(c.lhs(), 0.0, 1e-15);
        close(c.rhs(), 1.0, 1e-15);
        let c = pereira_bound(&cfg(&[0.0, 1.0, -1.0]), 1.0).unwrap();
        close(c.lhs(), 2.0 / 3f64.sqrt(), 1e-14);
        close(c.rhs(), 4.0 / 3.0, 1e-15);
        let c = pereira_bound(&cfg(&[0.0, 1.0, 2.0]), 2.0).unwrap();
        close(c.lhs(), 8.0 / 3.0, 1e-13);
        close(c.rhs(), 10.0 / 3.0, 1e-14);
        assert!(c.holds());
    }

    #[test]
    fn weyl_examples() {
        let d = CMatrix::from_diag(&[Complex64::new(2.0, 1.0), Complex64::new(-0.5, 0.0), Complex64::new(0.0, 3.0)]);
        for p in [1.0, 2.5, 4.0] {
            let c = weyl_check(&d, p).unwrap();
            close(c.lhs(), c.rhs(), 1e-13);
        }
        let nil = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let c = weyl_check(&nil, 2.0).unwrap();
        assert_eq!((c.lhs(), c.rhs()), (0.0, 1.0));
        let c = weyl_check(&differentiator(&cfg(&[2.0, -1.0, -1.0])), 3.0).unwrap();
        close(c.lhs(), c.rhs(), 1e-10);
        close(c.rhs(), 2.0, 1e-13);
    }

    #[test]
    fn endpoint_examples() {
        let [s1, s2, sinf] = endpoint_checks(&cfg(&[1.0, -1.0])).unwrap();
        assert_eq!((s1.lhs(), s2.lhs(), sinf.lhs()), (0.0, 0.0, 0.0));
        assert_eq!(s1.rhs(), 0.0);
        assert_eq!(sinf.rhs(), 1.0);
        assert!(s1.holds() && s2.holds() && sinf.holds());

        let [s1, s2, _] = endpoint_checks(&cfg(&[0.0, 1.0, -1.0])).unwrap();
        close(s2.lhs(), 2.0 / 3.0, 1e-15);
        close(s2.rhs(), 2.0 / 3.0, 1e-15);
        close(s1.lhs(), 2.0 / 3f64.sqrt(), 1e-15);
        close(s1.rhs(), 2.0 / 3f64.sqrt(), 1e-15);
        assert!(s1.holds() && s2.holds());
    }

    #[test]
    fn esf_examples() {
        let c = esf_bounds(&cfg(&[0.0, 1.0, -1.0])).unwrap();
        close(c[0].lhs(), 2.0 / 3f64.sqrt(), 1e-15);
        close(c[0].rhs(), 4.0 / 3.0, 1e-15);
        close(c[1].lhs(), 1.0 / 3.0, 1e-15);
        close(c[1].rhs(), 1.0 / 3.0, 1e-15);

        let c = esf_bounds(&cfg(&[1.0, -1.0])).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].lhs(), c[0].rhs()), (0.0, 1.0));

        let c = esf_bounds(&cfg(&[1.0, -1.0, 1.0, -1.0])).unwrap();
        let expect = [(2.0, 3.0), (1.0, 3.0), (0.0, 1.0)];
        for (cert, (l, r)) in c.iter().zip(expect) {
            close(cert.lhs(), l, 1e-14);
            close(cert.rhs(), r, 1e-15);
            assert!(cert.holds());
        }
    }

    #[test]
    fn sv_product_examples() {
        let one = Complex64::new(1.0, 0.0);
        let d = [one, -one];
        let c = sv_product_check(&CMatrix::identity(2), &d).unwrap();
        assert!(c.iter().all(|c| c.holds() && (c.lhs() - c.rhs()).abs() < 1e-15));

        let q = crate::densela::projector_q(2).unwrap();
        let c = sv_product_check(&q, &d).unwrap();
        assert_eq!(c[0].lhs(), 0.0);
        close(c[0].rhs(), 1.0, 1e-15);
        assert!(c[0].holds());

        assert!(matches!(sv_product_check(&q, &[one]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn check_all_examples() {
        let out = check_all(&cfg(&[0.0, 1.0, -1.0]), &[1.0, 2.0, 4.0]).unwrap();
        assert!(out.all_hold());
        // 4 per-p groups x 3 + quartic 3 + endpoints 3 + esf (n-1 = 2)
        assert_eq!(out.certificates.len(), 20);
        let names: Vec<&str> = out.certificates.iter().map(Certificate::name).collect();
        assert!(names.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(out.certificates[0].key(), "endpoint_s1@p=1");
        let schoenberg_p: Vec<f64> = out.certificates.iter().filter(|c| c.name() == "schoenberg").filter_map(Certificate::p).collect();
        assert_eq!(schoenberg_p, vec![1.0, 2.0, 4.0]);

        let out = check_all(&cfg(&[1.0, -1.0]), &[2.0]).unwrap();
        assert!(out.all_hold());
        assert!(out.certificates.iter().filter(|c| c.name() != "endpoint_sinf").all(|c| c.lhs() == 0.0));

        assert!(matches!(check_all(&cfg(&[1.0, 2.0, 3.0]), &[2.0]), Err(Error::NotCentered { .. })));
    }

    #[test]
    fn certificate_json_round_trip() {
        let out = check_all(&cfg(&[0.0, 1.0, -1.0]), &[1.5]).unwrap();
        for c in &out.certificates {
            let text = serde_json::to_string(c).unwrap();
            let back: Certificate = serde_json::from_str(&text).unwrap();
            assert_eq!(&back, c);
        }
        let text = serde_json::to_string(&out.certificates[0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 8);
    }
}
