use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hankel_core::asymptotics::PredictionVariant;
use hankel_core::eigen::precision_policy;
use hankel_core::numerics::Identity;
use hankel_cli::cache::{load_or_compute, MomentDocument};
use hankel_cli::config::{parse_n_list, parse_variant};
use hankel_cli::output::{sink, write_rows};
use hankel_cli::verify::{run_verify, VerifyOptions, DEFAULT_INSTANCES, DEFAULT_SEED};
use hankel_cli::{kernel, studies, sweep, CliError, OutFormat, RunConfig};

#[derive(Parser)]
#[command(name = "hankel", version, about = "Smallest eigenvalues of Hankel moment matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment table μ_0..μ_{2·max N} as JSON
    Moments(Common),
    /// Certified λ_N for each N against the asymptotic predictions
    Sweep(SweepArgs),
    /// Exact support endpoints against their large-N expansions
    Endpoints(Common),
    /// Integral identities, orthonormality and Parseval checks
    Verify(VerifyArgs),
    /// λ_N prediction for one variant
    Predict(Common),
    /// Exact kernel on the window [N-√N, N] against the asymptotic diagonal
    Kernel(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    /// Order or comma-separated increasing orders
    #[arg(long, default_value = "10")]
    n: String,
    /// Working precision override in bits
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, default_value = "proof", value_parser = parse_variant)]
    variant: PredictionVariant,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Moment cache directory
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Fill the wall_ms column (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_INSTANCES)]
    instances: usize,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let n_list = parse_n_list(&self.n).map_err(CliError::Config)?;
        let cfg = RunConfig {
            alpha: self.alpha,
            t: self.t,
            n_list,
            bits_override: self.bits,
            variant: self.variant,
            out_format: self.format,
            cache_dir: self.cache.clone(),
            threads: self.threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn finish(mut w: Box<dyn Write>) -> Result<(), CliError> {
    w.flush()?;
    Ok(())
}

fn cmd_moments(c: &Common) -> Result<(), CliError> {
    let cfg = c.config()?;
    let p = cfg.validate()?;
    let max_n = cfg.max_n() as usize;
    let bits = cfg.bits_override.unwrap_or_else(|| precision_policy(max_n, &p));
    let start = Instant::now();
    let (table, status) = load_or_compute(&p, bits, (2 * max_n).max(2), cfg.cache_dir.as_deref())?;
    eprintln!("moments: {status:?}, {} ms", start.elapsed().as_millis());
    let doc = MomentDocument::from_table(&table);
    let mut w = sink(c.out.as_deref())?;
    match cfg.out_format {
        OutFormat::Json => w.write_all(doc.to_json()?.as_bytes())?,
        OutFormat::Csv => {
            writeln!(w, "k,mu")?;
            for (k, v) in doc.values.iter().enumerate() {
                writeln!(w, "{k},{v}")?;
            }
        }
    }
    finish(w)
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let cfg = a.common.config()?;
    let out = sweep::run_sweep(&cfg, a.timing)?;
    let w = sink(a.common.out.as_deref())?;
    out.write(cfg.out_format, w)?;
    let failed: Vec<String> = out
        .failures()
        .map(|r| format!("N={}: {}", r.n, r.error.as_deref().unwrap_or("")))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(failed.join("; ")))
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let inject_fault = match a.inject_fault.as_deref() {
        None => None,
        Some(name) => Some(
            Identity::ALL
                .into_iter()
                .find(|i| i.name().eq_ignore_ascii_case(name))
                .ok_or_else(|| CliError::Config(format!("unknown identity {name}")))?,
        ),
    };
    let opts = VerifyOptions {
        bits: a.common.bits.unwrap_or(VerifyOptions::default().bits),
        instances: a.instances,
        seed: a.seed,
        inject_fault,
    };
    let report = run_verify(&opts)?;
    let mut w = sink(a.common.out.as_deref())?;
    w.write_all(report.table().as_bytes())?;
    finish(w)?;
    let failing = report.failing();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failing checks: {}", failing.join(", "))))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Moments(c) => cmd_moments(c),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Endpoints(c) => {
            let cfg = c.config()?;
            let rows = studies::endpoint_rows(&cfg)?;
            write_rows(&rows, cfg.out_format, sink(c.out.as_deref())?)
        }
        Command::Verify(a) => cmd_verify(a),
        Command::Predict(c) => {
            let cfg = c.config()?;
            let rows = studies::predict_rows(&cfg)?;
            write_rows(&rows, cfg.out_format, sink(c.out.as_deref())?)
        }
        Command::Kernel(c) => {
            let cfg = c.config()?;
            let rows = kernel::kernel_rows(&cfg)?;
            write_rows(&rows, cfg.out_format, sink(c.out.as_deref())?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hankel: {e}");
            e.into()
        }
    }
}
