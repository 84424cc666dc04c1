use clap::{Parser, Subcommand, ValueEnum};
use schoenberg::certs::{check_all, Certificate};
use schoenberg::error::Result;
use schoenberg::harness::{
    emit_report, emit_sweep, parse_p_list, parse_zeros, run_audit, sweep_p, AuditSpec, ReportFormat,
};
use schoenberg::polyzero::ZeroConfig;
use schoenberg::serial::fmt17;
use schoenberg::sharpness::{extremal_high, extremal_low, maximize_ratio, opnorm_lower_bound};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "schoenberg", version, about = "Certificates for inequalities between zeros and critical points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every certificate on one configuration; exit 0 iff all hold.
    Check {
        /// File of `re im` lines, or inline literals like `1+2i,-1-2i`.
        #[arg(long, allow_hyphen_values = true)]
        zeros: String,
        /// Comma-separated exponents.
        #[arg(long, default_value = "1,2,4")]
        p: String,
        /// Shift the zeros to centroid 0 first.
        #[arg(long)]
        center: bool,
    },
    /// Run a batch audit described by a JSON spec file.
    Audit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write the order-p certificate across a grid of exponents as CSV.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        zeros: String,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        center: bool,
    },
    /// Search for configurations maximising the order-p ratio.
    Sharpness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the differentiator's l^p -> S_p norm and compare with c(n,p).
    Opnorm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print an extremal configuration as `re im` lines.
    Extremal {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    High,
    Low,
}

fn load_zeros(arg: &str, center: bool) -> Result<ZeroConfig> {
    let cfg = parse_zeros(arg)?;
    Ok(if center { cfg.center() } else { cfg })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

/// Writes to stdout, ignoring a closed pipe (`schoenberg ... | head`).
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { zeros, p, center } => {
            let cfg = load_zeros(&zeros, center)?;
            let outcome = check_all(&cfg, &parse_p_list(&p)?)?;
            emit(&to_json(&outcome.certificates));
            for f in &outcome.failures {
                eprintln!("not evaluated: {} (p = {:?}): {}", f.name, f.p, f.message);
            }
            let failed: Vec<&Certificate> = outcome.certificates.iter().filter(|c| !c.holds()).collect();
            for c in &failed {
                eprintln!("FAILS {}: lhs {} > rhs {}", c.key(), fmt17(c.lhs()), fmt17(c.rhs()));
            }
            Ok(if outcome.all_hold() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Audit { spec, out, format } => {
            let spec = AuditSpec::load(&spec)?;
            let report = run_audit(&spec)?;
            let format = match format {
                Format::Json => ReportFormat::Json,
                Format::Csv => ReportFormat::Csv,
            };
            emit_report(&report, &out, format)?;
            eprintln!(
                "{} samples, {} violations, {} evaluation failures in {:.2?}",
                report.samples,
                report.violations.len(),
                report.failures.len(),
                report.wall_time
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { zeros, grid, out, center } => {
            let cfg = load_zeros(&zeros, center)?;
            emit_sweep(&sweep_p(&cfg, &parse_p_list(&grid)?)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sharpness { n, p, budget, seed } => {
            let r = maximize_ratio(n, p, budget, seed)?;
            emit(&to_json(&r));
            if r.violation {
                eprintln!("ratio {} exceeds 1: this configuration violates the order-p bound", fmt17(r.best_ratio));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Opnorm { n, p, budget, seed } => {
            let e = opnorm_lower_bound(n, p, budget, seed)?;
            emit(&to_json(&e));
            if e.exceeds_bound {
                eprintln!("estimate {} exceeds c(n,p) = {}", fmt17(e.estimate), fmt17(e.bound));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Extremal { family, n } => {
            let cfg = match family {
                Family::High => extremal_high(n)?,
                Family::Low => extremal_low(n)?,
            };
            for z in cfg.zeros() {
                emit(&format!("{} {}", z.re, z.im));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
