//! Extremal configurations and numerical search for configurations that
//! come close to equality.
//!
//! Both searches run Nelder–Mead over the centered subspace, parametrised by
//! the first `n - 1` zeros (real and imaginary parts interleaved) with the
//! last zero fixed to minus their sum.

use crate::certs::{interpolation_constant, schoenberg_constant};
use crate::densela::{differentiator, eigenvalues, lp_norm, schatten_norm, validate_exponent};
use crate::densela::critical_from_spectrum;
use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::polyzero::ZeroConfig;
use crate::serial::{f64_17, f64_list_17};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// Relative excess over the theoretical maximum reported as a violation.
pub const VIOLATION_REL_TOL: f64 = 1e-9;

/// `n/2` copies each of `+1` and `-1`.
pub fn extremal_high(n: usize) -> Result<ZeroConfig> {
    if n < 4 {
        return Err(Error::OrderTooSmall { n, min: 4 });
    }
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    let half = n / 2;
    let v: Vec<f64> = (0..n).map(|i| if i < half { 1.0 } else { -1.0 }).collect();
    ZeroConfig::from_real(&v)
}

/// `n - 2` zeros at the origin, then `+1` and `-1`.
pub fn extremal_low(n: usize) -> Result<ZeroConfig> {
    if n < 3 {
        return Err(Error::OrderTooSmall { n, min: 3 });
    }
    let mut v = vec![0.0; n - 2];
    v.extend([1.0, -1.0]);
    ZeroConfig::from_real(&v)
}

fn check_search_input(cfg: &ZeroConfig, p: f64) -> Result<()> {
    validate_exponent(p)?;
    if cfg.n() < 3 {
        return Err(Error::OrderTooSmall { n: cfg.n(), min: 3 });
    }
    cfg.require_centered()?;
    if cfg.zeros().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::AllZero);
    }
    Ok(())
}

/// `sum |w_k|^p / (C(n,p) sum |z_j|^p)` over the critical points `w`.
pub fn ratio(cfg: &ZeroConfig, p: f64) -> Result<f64> {
    check_search_input(cfg, p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let critical = critical_from_spectrum(&eigenvalues(&differentiator(cfg))?);
    // Power sums are taken after dividing by the largest zero so large p cannot overflow.
    let scale = cfg.zeros().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sum = |v: &[Complex64]| v.iter().map(|z| (z.norm() / scale).powf(p)).sum::<f64>();
    Ok(sum(critical.points()) / (schoenberg_constant(cfg.n(), p) * sum(cfg.zeros())))
}

/// `||Q diag(z) Q||_{S_p} / ||z||_p`.
pub fn opnorm_ratio(cfg: &ZeroConfig, p: f64) -> Result<f64> {
    check_search_input(cfg, p)?;
    Ok(schatten_norm(&differentiator(cfg), p)? / lp_norm(cfg.zeros(), p)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessResult {
    pub n: usize,
    #[serde(serialize_with = "f64_17")]
    pub p: f64,
    pub best_config: ZeroConfig,
    #[serde(serialize_with = "f64_17")]
    pub best_ratio: f64,
    pub evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Best ratio reached by each restart, in restart order.
    #[serde(serialize_with = "f64_list_17")]
    pub restart_optima: Vec<f64>,
    /// `best_ratio > 1 + VIOLATION_REL_TOL`, i.e. a counterexample to the bound.
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpnormEstimate {
    pub n: usize,
    #[serde(serialize_with = "f64_17")]
    pub p: f64,
    #[serde(serialize_with = "f64_17")]
    pub estimate: f64,
    /// `c(n, p)`.
    #[serde(serialize_with = "f64_17")]
    pub bound: f64,
    pub best_config: ZeroConfig,
    pub evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub exceeds_bound: bool,
}

fn check_params(n: usize, p: f64, budget: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::OrderTooSmall { n, min: 3 });
    }
    validate_exponent(p)?;
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    Ok(())
}

fn config_from_params(x: &[f64]) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = x.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    let last = -z.iter().sum::<Complex64>();
    z.push(last);
    z
}

fn params_from_config(cfg: &ZeroConfig) -> Vec<f64> {
    let z = cfg.zeros();
    z[..z.len() - 1].iter().flat_map(|w| [w.re, w.im]).collect()
}

/// Rescales the parameters so the largest of all `n` zeros has modulus 1.
fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let m = config_from_params(&x).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v /= m);
    }
    x
}

fn random_start(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    normalized((0..2 * (n - 1)).map(|_| StandardNormal.sample(rng)).collect())
}

/// Objective value, or `None` where it is undefined (all zeros vanish).
fn eval_at(x: &[f64], objective: fn(&ZeroConfig, f64) -> Result<f64>, p: f64) -> Option<(ZeroConfig, f64)> {
    let cfg = ZeroConfig::new(config_from_params(x)).ok()?;
    let v = objective(&cfg, p).ok()?;
    v.is_finite().then_some((cfg, v))
}

struct SearchOutcome {
    best_config: ZeroConfig,
    best: f64,
    evaluations: usize,
    optima: Vec<f64>,
}

/// Maximises `objective` from each start in turn, then from random starts,
/// until `budget` evaluations are used.
fn search(
    n: usize,
    p: f64,
    budget: usize,
    seed: u64,
    objective: fn(&ZeroConfig, f64) -> Result<f64>,
    fixed_starts: Vec<Vec<f64>>,
) -> Result<SearchOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nm = NelderMead::default();
    let mut best: Option<(ZeroConfig, f64)> = None;
    let mut evaluations = 0;
    let mut optima = Vec::new();
    let mut fixed = fixed_starts.into_iter();

    while evaluations < budget {
        let x0 = fixed.next().unwrap_or_else(|| random_start(n, &mut rng));
        let mut restart_best = f64::NEG_INFINITY;
        let run = nm.minimize(
            |x| match eval_at(x, objective, p) {
                Some((cfg, v)) => {
                    restart_best = restart_best.max(v);
                    if best.as_ref().is_none_or(|(_, b)| v > *b) {
                        best = Some((cfg, v));
                    }
                    -v
                }
                None => f64::INFINITY,
            },
            &x0,
            budget - evaluations,
        );
        evaluations += run.evaluations;
        optima.push(restart_best);
    }

    let (best_config, best) = best.ok_or_else(|| {
        Error::InvalidParameter("no evaluation produced a defined objective value".into())
    })?;
    Ok(SearchOutcome {
        best_config,
        best,
        evaluations,
        optima,
    })
}

/// Searches centered configurations of order `n` for the largest [`ratio`].
///
/// Deterministic in `(n, p, budget, seed)`.
pub fn maximize_ratio(n: usize, p: f64, budget: usize, seed: u64) -> Result<SharpnessResult> {
    check_params(n, p, budget)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let out = search(n, p, budget, seed, ratio, Vec::new())?;
    Ok(SharpnessResult {
        n,
        p,
        violation: out.best > 1.0 + VIOLATION_REL_TOL,
        best_config: out.best_config,
        best_ratio: out.best,
        evaluations: out.evaluations,
        restarts: out.optima.len(),
        seed,
        restart_optima: out.optima,
    })
}

/// Lower estimate of the norm of `z -> Q diag(z) Q` from centered `l^p` to
/// `S_p`, compared with `c(n, p)`.
///
/// The search starts from whichever extremal families exist for `n`, then
/// continues from random points.
pub fn opnorm_lower_bound(n: usize, p: f64, budget: usize, seed: u64) -> Result<OpnormEstimate> {
    check_params(n, p, budget)?;
    let mut starts = Vec::new();
    if let Ok(cfg) = extremal_high(n) {
        starts.push(params_from_config(&cfg));
    }
    starts.push(params_from_config(&extremal_low(n)?));
    let out = search(n, p, budget, seed, opnorm_ratio, starts)?;
    let bound = interpolation_constant(n, p);
    Ok(OpnormEstimate {
        n,
        p,
        estimate: out.best,
        bound,
        best_config: out.best_config,
        evaluations: out.evaluations,
        restarts: out.optima.len(),
        seed,
        exceeds_bound: out.best > bound * (1.0 + VIOLATION_REL_TOL),
    })
}
