use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

use super::config::ExperimentConfig;
use super::experiments;
use super::report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "strongdamp",
    version,
    about = "Decay-rate verification for the strongly damped wave equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Low-frequency error against its t^{-n/2} and t^{-n/2-1} bound.
    VerifyLemma21(Common),
    /// Full-space error, its split and the high-frequency pieces.
    VerifyTheorem11(Common),
    /// Asymptotics of the profile sine and cosine norms.
    ProfileNorms(Common),
    /// Exponential decay rates of single high-frequency modes.
    HfEnvelope(Common),
    /// Moment bounds on the oscillatory parts over random data.
    Lemma22(Common),
    /// Kirchhoff/Poisson profile against the grid profile.
    KirchhoffCrosscheck(Common),
    /// Exact identity and multiplier-equivalence suites.
    Identities(Common),
}

fn configure_threads() {
    if let Some(k) = std::env::var("STRONGDAMP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
    {
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
}

fn is_usage_error(e: &Error) -> bool {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) | Error::UnsupportedDimension(_) => true,
        Error::AtTime { source, .. } => is_usage_error(source),
        _ => false,
    }
}

fn run(command: &Command, cfg: &ExperimentConfig) -> crate::Result<Report> {
    match command {
        Command::VerifyLemma21(_) => experiments::verify_lemma21(cfg),
        Command::VerifyTheorem11(_) => experiments::verify_theorem11(cfg),
        Command::ProfileNorms(_) => {
            experiments::profile_norm_asymptotics(cfg.dimension, &cfg.t_grid(), cfg.quad_tol)
        }
        Command::HfEnvelope(_) => experiments::hf_envelope(cfg),
        Command::Lemma22(_) => experiments::lemma22_suite(cfg.samples, cfg.seed),
        Command::KirchhoffCrosscheck(_) => experiments::kirchhoff_crosscheck(cfg),
        Command::Identities(_) => experiments::identities(cfg.samples, cfg.seed),
    }
}

/// Parses `argv` (program name first), runs the experiment and writes its CSV
/// and JSON. Returns 0 when every check passes, 1 when a check fails or the
/// computation breaks down, and 2 for usage or config errors.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let common = match &cli.command {
        Command::VerifyLemma21(c)
        | Command::VerifyTheorem11(c)
        | Command::ProfileNorms(c)
        | Command::HfEnvelope(c)
        | Command::Lemma22(c)
        | Command::KirchhoffCrosscheck(c)
        | Command::Identities(c) => c,
    };
    let mut cfg = match &common.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    configure_threads();

    let report = match run(&cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if is_usage_error(&e) { 2 } else { 1 };
        }
    };
    match report.write(&cfg.output_dir) {
        Ok((csv, json)) => println!("wrote {} and {}", csv.display(), json.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    }
    for c in &report.checks {
        let verdict = match (c.pass, c.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => "FAIL",
        };
        println!(
            "{verdict} {}: {:.6e} ({:?} {:.6e})",
            c.name, c.value, c.comparison, c.threshold
        );
    }
    let failures = report.failures();
    if failures.is_empty() {
        0
    } else {
        for c in failures {
            eprintln!("check failed: {}", c.name);
        }
        1
    }
}
