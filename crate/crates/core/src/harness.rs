//! Random configurations, batch audits, p-sweeps and report files.

use crate::certs::{check_all_with, schoenberg_order_p, Certificate, CheckOptions, Tolerance};
use crate::densela::validate_exponent;
use crate::error::{Error, Result};
use crate::polyzero::ZeroConfig;
use crate::serial::{f64_17, fmt17, opt_f64_17};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

/// Spans both exponent regimes and the classical orders 1, 2 and 4.
pub const DEFAULT_P_GRID: [f64; 10] = [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Uniform on the closed unit disk.
    Disk,
    /// Standard complex normal: each part has variance 1/2.
    Gaussian,
    /// Standard real normal on the real axis.
    Real,
    /// Two blobs at `+1` and `-1` with spread 0.1, side chosen by a fair coin.
    Clustered,
    /// The `n`-th roots of unity plus complex normal noise of scale 0.05.
    RootsOfUnityPerturbed,
}

impl Distribution {
    pub const ALL: [Distribution; 5] = [
        Distribution::Disk,
        Distribution::Gaussian,
        Distribution::Real,
        Distribution::Clustered,
        Distribution::RootsOfUnityPerturbed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Disk => "disk",
            Distribution::Gaussian => "gaussian",
            Distribution::Real => "real",
            Distribution::Clustered => "clustered",
            Distribution::RootsOfUnityPerturbed => "roots_of_unity_perturbed",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::UnknownDistribution(s.to_string()))
    }
}

fn complex_normal(rng: &mut ChaCha8Rng, sigma: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * sigma
}

/// `n` zeros drawn from `dist` with a generator seeded by `seed`, then centered.
pub fn sample_config(n: usize, dist: Distribution, seed: u64) -> Result<ZeroConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros: Vec<Complex64> = (0..n)
        .map(|k| match dist {
            Distribution::Disk => Complex64::from_polar(rng.random::<f64>().sqrt(), TAU * rng.random::<f64>()),
            Distribution::Gaussian => complex_normal(&mut rng, FRAC_1_SQRT_2),
            Distribution::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
            Distribution::Clustered => {
                let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(side, 0.0) + complex_normal(&mut rng, 0.1)
            }
            Distribution::RootsOfUnityPerturbed => {
                Complex64::from_polar(1.0, TAU * k as f64 / n as f64) + complex_normal(&mut rng, 0.05)
            }
        })
        .collect();
    Ok(ZeroConfig::new(zeros)?.center())
}

/// Zeros with independent standard-normal real and imaginary parts, not centered.
pub fn sample_uncentered(n: usize, seed: u64) -> Result<ZeroConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ZeroConfig::new((0..n).map(|_| complex_normal(&mut rng, 1.0)).collect())
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one audit sample, a pure function of the master seed and the
/// sample's coordinates so it does not depend on evaluation order.
pub fn sample_seed(master: u64, n: usize, dist: Distribution, index: usize) -> u64 {
    let dist_tag = Distribution::ALL.iter().position(|d| *d == dist).unwrap_or(0) as u64;
    [n as u64, dist_tag, index as u64]
        .into_iter()
        .fold(splitmix64(master), |acc, v| splitmix64(acc ^ v))
}

/// Parameters of a batch audit; omitted JSON fields take the values of
/// [`AuditSpec::default`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSpec {
    pub n_values: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub distributions: Vec<Distribution>,
    pub samples_per_cell: usize,
    pub seed: u64,
    pub tolerances: Tolerance,
    /// Multiplies `C(n,p)` in the order-p certificate. Values below 1 break
    /// the constant on purpose to confirm that the audit notices.
    pub sabotage_factor: f64,
}

impl Default for AuditSpec {
    fn default() -> Self {
        Self {
            n_values: (3..=8).collect(),
            p_grid: DEFAULT_P_GRID.to_vec(),
            distributions: Distribution::ALL.to_vec(),
            samples_per_cell: 200,
            seed: 0,
            tolerances: Tolerance::default(),
            sabotage_factor: 1.0,
        }
    }
}

impl AuditSpec {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.n_values.is_empty() {
            return invalid("n_values is empty");
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::OrderTooSmall { n, min: 2 });
        }
        if self.p_grid.is_empty() {
            return invalid("p_grid is empty");
        }
        for &p in &self.p_grid {
            validate_exponent(p)?;
            if p.is_infinite() {
                return Err(Error::InvalidExponent(p));
            }
        }
        if self.distributions.is_empty() {
            return invalid("distributions is empty");
        }
        if self.samples_per_cell == 0 {
            return invalid("samples_per_cell must be at least 1");
        }
        if !(self.sabotage_factor > 0.0 && self.sabotage_factor.is_finite()) {
            return invalid("sabotage_factor must be positive and finite");
        }
        if !(self.tolerances.abs >= 0.0 && self.tolerances.rel >= 0.0) {
            return invalid("tolerances must be nonnegative");
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let spec: AuditSpec =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    fn options(&self) -> CheckOptions {
        CheckOptions {
            tolerance: self.tolerances,
            schoenberg_factor: self.sabotage_factor,
        }
    }
}

/// Where a configuration came from inside an audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRef {
    pub n: usize,
    pub distribution: Distribution,
    pub index: usize,
    pub seed: u64,
    pub config: ZeroConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertSummary {
    pub name: String,
    #[serde(serialize_with = "opt_f64_17")]
    pub p: Option<f64>,
    pub total: usize,
    pub passed: usize,
    pub violated: usize,
    #[serde(serialize_with = "opt_f64_17")]
    pub max_ratio: Option<f64>,
    /// The certificate attaining `max_ratio` and its configuration.
    pub worst: Option<Certificate>,
    pub argmax: Option<SampleRef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub certificate: Certificate,
    pub sample: SampleRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub name: String,
    #[serde(serialize_with = "opt_f64_17")]
    pub p: Option<f64>,
    pub message: String,
    pub sample: SampleRef,
}

/// Aggregated audit outcome. Wall time is kept out of the serialized form so
/// identical specs produce identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub spec: AuditSpec,
    pub samples: usize,
    pub certificates: Vec<CertSummary>,
    pub violations: Vec<Violation>,
    pub failures: Vec<SampleFailure>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl AuditReport {
    pub fn summary(&self, name: &str, p: Option<f64>) -> Option<&CertSummary> {
        self.certificates.iter().find(|s| s.name == name && s.p == p)
    }

    pub fn total_violations(&self) -> usize {
        self.violations.len()
    }

    /// Certificates written to CSV: the worst instance of every
    /// `(name, p)` followed by every violation.
    pub fn rows(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates
            .iter()
            .filter_map(|s| s.worst.as_ref())
            .chain(self.violations.iter().map(|v| &v.certificate))
    }

    /// Re-evaluates a stored violation from its configuration alone.
    pub fn recheck(&self, v: &Violation) -> Result<bool> {
        let out = check_all_with(&v.sample.config, &p_list_for(&v.certificate), self.spec.options())?;
        Ok(out
            .certificates
            .iter()
            .any(|c| c.key() == v.certificate.key() && !c.holds()))
    }
}

fn p_list_for(cert: &Certificate) -> Vec<f64> {
    cert.p().into_iter().collect()
}

struct SampleOutcome {
    sample: SampleRef,
    result: Result<crate::certs::CheckOutcome>,
}

/// Runs [`check_all_with`] on every sample of every `(n, distribution)` cell.
///
/// Samples are evaluated in parallel and folded in their fixed enumeration
/// order, so the report depends on the spec alone.
pub fn run_audit(spec: &AuditSpec) -> Result<AuditReport> {
    spec.validate()?;
    let start = Instant::now();
    let mut tasks = Vec::new();
    for &n in &spec.n_values {
        for &dist in &spec.distributions {
            for index in 0..spec.samples_per_cell {
                tasks.push((n, dist, index));
            }
        }
    }
    let opts = spec.options();
    let outcomes: Vec<SampleOutcome> = tasks
        .into_par_iter()
        .map(|(n, dist, index)| {
            let seed = sample_seed(spec.seed, n, dist, index);
            let config = sample_config(n, dist, seed)?;
            let result = check_all_with(&config, &spec.p_grid, opts);
            Ok(SampleOutcome {
                sample: SampleRef { n, distribution: dist, index, seed, config },
                result,
            })
        })
        .collect::<Result<_>>()?;

    let mut summaries: BTreeMap<(String, Option<u64>), CertSummary> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut failures = Vec::new();
    for SampleOutcome { sample, result } in &outcomes {
        let outcome = match result {
            Ok(o) => o,
            Err(e) => {
                failures.push(SampleFailure {
                    name: "sample".into(),
                    p: None,
                    message: e.to_string(),
                    sample: sample.clone(),
                });
                continue;
            }
        };
        for f in &outcome.failures {
            failures.push(SampleFailure {
                name: f.name.clone(),
                p: f.p,
                message: f.message.clone(),
                sample: sample.clone(),
            });
        }
        for cert in &outcome.certificates {
            let key = (cert.name().to_string(), cert.p().map(f64::to_bits));
            let s = summaries.entry(key).or_insert_with(|| CertSummary {
                name: cert.name().to_string(),
                p: cert.p(),
                total: 0,
                passed: 0,
                violated: 0,
                max_ratio: None,
                worst: None,
                argmax: None,
            });
            s.total += 1;
            if cert.holds() {
                s.passed += 1;
            } else {
                s.violated += 1;
                violations.push(Violation {
                    certificate: cert.clone(),
                    sample: sample.clone(),
                });
            }
            if let Some(r) = cert.ratio() {
                if s.max_ratio.is_none_or(|m| r > m) {
                    s.max_ratio = Some(r);
                    s.worst = Some(cert.clone());
                    s.argmax = Some(sample.clone());
                }
            }
        }
    }

    let mut certificates: Vec<CertSummary> = summaries.into_values().collect();
    certificates.sort_by(|a, b| {
        a.name.cmp(&b.name).then_with(|| match (a.p, b.p) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (x, y) => x.is_some().cmp(&y.is_some()),
        })
    });
    Ok(AuditReport {
        seed: spec.seed,
        spec: spec.clone(),
        samples: outcomes.len(),
        certificates,
        violations,
        failures,
        wall_time: start.elapsed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(serialize_with = "f64_17")]
    pub p: f64,
    #[serde(serialize_with = "f64_17")]
    pub lhs: f64,
    #[serde(serialize_with = "f64_17")]
    pub rhs: f64,
    #[serde(serialize_with = "opt_f64_17")]
    pub ratio: Option<f64>,
}

/// The order-p certificate of `cfg` at every `p` of `grid`, sorted by `p`.
pub fn sweep_p(cfg: &ZeroConfig, grid: &[f64]) -> Result<Vec<SweepRow>> {
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&p| {
            let c = schoenberg_order_p(cfg, p)?;
            Ok(SweepRow {
                p,
                lhs: c.lhs(),
                rhs: c.rhs(),
                ratio: c.ratio(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Parse(format!("unknown report format '{other}'"))),
        }
    }
}

fn opt17(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

pub const CSV_HEADER: &str = "name,n,p,lhs,rhs,slack,ratio,holds";

/// One CSV line (without newline) for a certificate.
pub fn csv_row(c: &Certificate) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        c.name(),
        c.n(),
        opt17(c.p()),
        fmt17(c.lhs()),
        fmt17(c.rhs()),
        fmt17(c.slack()),
        opt17(c.ratio()),
        c.holds()
    )
}

pub fn report_to_string(report: &AuditReport, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for c in report.rows() {
                s.push_str(&csv_row(c));
                s.push('\n');
            }
            s
        }
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn emit_report(report: &AuditReport, path: &Path, format: ReportFormat) -> Result<()> {
    write_file(path, &report_to_string(report, format)?)
}

/// Plot-ready `p,lhs,rhs,ratio` table.
pub fn emit_sweep(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut s = String::from("p,lhs,rhs,ratio\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", fmt17(r.p), fmt17(r.lhs), fmt17(r.rhs), opt17(r.ratio)));
    }
    write_file(path, &s)
}

/// Zeros from a file of `re im` lines, or from comma-separated complex
/// literals such as `1+2i,-i,0.5` when `arg` is not an existing file.
pub fn parse_zeros(arg: &str) -> Result<ZeroConfig> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_zero_lines(&text)
    } else {
        parse_zero_inline(arg)
    }
}

/// One `re im` pair per line; blank lines and `#` comments are skipped.
pub fn parse_zero_lines(text: &str) -> Result<ZeroConfig> {
    let mut zeros = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [re, im] = parts[..] else {
            return Err(Error::Parse(format!("line {}: expected `re im`, got '{line}'", i + 1)));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: '{s}': {e}", i + 1)))
        };
        zeros.push(Complex64::new(num(re)?, num(im)?));
    }
    ZeroConfig::new(zeros)
}

pub fn parse_zero_inline(text: &str) -> Result<ZeroConfig> {
    let zeros = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<Complex64>()
                .map_err(|e| Error::Parse(format!("'{s}': {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    ZeroConfig::new(zeros)
}

/// Comma-separated list of exponents; `inf` is accepted where allowed.
pub fn parse_p_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")))
        })
        .collect()
}
