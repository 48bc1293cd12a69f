use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use conemetric::ordernorm::{DEFAULT_BOUNDARY_BAND, DEFAULT_GAUGE_REL_TOL, DEFAULT_MEMBERSHIP_TOL};
use conemetric::report::to_json_pretty;
use conemetric::Error;

mod commands;

/// Order-unit norms, cone metrics and their topologies.
#[derive(Debug, Parser)]
#[command(name = "conemetric", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for every random choice; CONEMETRIC_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cone membership slack.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMBERSHIP_TOL, value_parser = positive)]
    tol_membership: f64,

    /// Relative accuracy of the gauge bisection.
    #[arg(long, global = true, default_value_t = DEFAULT_GAUGE_REL_TOL, value_parser = positive)]
    tol_gauge: f64,

    /// Relative width of the band around a threshold where comparisons are
    /// excluded rather than judged.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUNDARY_BAND, value_parser = positive)]
    boundary_band: f64,

    /// Number of random trials for sampled checks.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Record wall-clock time in the report. Off by default so that
    /// reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Membership, interior and order-unit tests, plus an Archimedean spot check.
    CheckCone {
        #[arg(long)]
        input: PathBuf,
    },
    /// Gauge and dual norms of a vector.
    Norm {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cone-metric axioms and the scalarized metric.
    VerifyMetric {
        #[arg(long)]
        input: PathBuf,
    },
    /// Ball identities, inclusions and the basis property.
    TopologyCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cauchy and convergence verdicts for a sequence.
    CauchyCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Banach iteration of a contraction on a finite domain.
    Fixpoint {
        #[arg(long, visible_alias = "input")]
        problem: PathBuf,
        /// Identifier of the starting point.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// The full acceptance battery.
    Suite,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckCone { .. } => "check-cone",
            Command::Norm { .. } => "norm",
            Command::VerifyMetric { .. } => "verify-metric",
            Command::TopologyCheck { .. } => "topology-check",
            Command::CauchyCheck { .. } => "cauchy-check",
            Command::Fixpoint { .. } => "fixpoint",
            Command::Suite => "suite",
        }
    }

    fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::CheckCone { input }
            | Command::Norm { input }
            | Command::VerifyMetric { input }
            | Command::TopologyCheck { input }
            | Command::CauchyCheck { input } => Some(input),
            Command::Fixpoint { problem, .. } => Some(problem),
            Command::Suite => None,
        }
    }
}

/// Settings shared by every command after flags and environment are merged.
pub struct Config {
    pub seed: u64,
    pub membership: f64,
    pub gauge_rel: f64,
    pub boundary_band: f64,
    pub trials: Option<usize>,
}

/// Results and violations produced by one command.
#[derive(Default)]
pub struct Outcome {
    pub results: Vec<Value>,
    pub violations: Vec<Value>,
}

fn seed_from_env(flag: u64) -> Result<u64, String> {
    match std::env::var("CONEMETRIC_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| format!("CONEMETRIC_SEED={s:?}: {e}")),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(format!("CONEMETRIC_SEED: {e}")),
    }
}

/// Input and configuration problems exit with 2, numerical failures with 3.
fn fail(kind: &str, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("conemetric: {kind}: {message}");
    ExitCode::from(if kind == "numerical failure" { 3 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match seed_from_env(cli.global.seed) {
        Ok(s) => s,
        Err(e) => return fail("configuration error", e),
    };
    let config = Config {
        seed,
        membership: cli.global.tol_membership,
        gauge_rel: cli.global.tol_gauge,
        boundary_band: cli.global.boundary_band,
        trials: cli.global.trials,
    };
    let name = cli.command.name();
    let text = match cli.command.input() {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some((t, path.display().to_string())),
            Err(e) => return fail("input error", format!("{}: {e}", path.display())),
        },
        None => None,
    };

    let start = Instant::now();
    let origin = text.as_ref().map(|(t, p)| (t.as_str(), p.as_str()));
    let outcome = match &cli.command {
        Command::CheckCone { .. } => commands::check_cone(&config, origin.expect("input")),
        Command::Norm { .. } => commands::norm(&config, origin.expect("input")),
        Command::VerifyMetric { .. } => commands::verify_metric(&config, origin.expect("input")),
        Command::TopologyCheck { .. } => commands::topology_check(&config, origin.expect("input")),
        Command::CauchyCheck { .. } => commands::cauchy_check(&config, origin.expect("input")),
        Command::Fixpoint {
            x0, tol, max_iter, ..
        } => commands::fixpoint(&config, origin.expect("input"), x0, *tol, *max_iter),
        Command::Suite => Ok(commands::suite(&config)),
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let outcome = match outcome {
        Ok(o) => o,
        Err(e @ Error::Parse { .. }) => return fail("parse error", e),
        Err(e) if e.is_numeric() => return fail("numerical failure", e),
        Err(e) => return fail("error", e),
    };

    let mut echo = json!({
        "command": name,
        "input_path": cli.command.input().map(|p| p.display().to_string()),
        "seed": config.seed,
        "tolerances": {
            "membership": config.membership,
            "gauge_rel": config.gauge_rel,
            "boundary_band": config.boundary_band,
        },
        "output_path": cli.global.output.as_ref().map(|p| p.display().to_string()),
        "trials": config.trials,
    });
    if let Command::Fixpoint {
        x0, tol, max_iter, ..
    } = &cli.command
    {
        echo["x0"] = json!(x0);
        echo["tol"] = json!(tol);
        echo["max_iter"] = json!(max_iter);
    }
    let clean = outcome.violations.is_empty();
    let report = json!({
        "command": name,
        "config_echo": echo,
        "results": outcome.results,
        "violations": outcome.violations,
        "timing_ms": if cli.global.timing { json!(elapsed_ms) } else { Value::Null },
    });
    let mut body = to_json_pretty(&report).expect("report serializes");
    body.push('\n');
    match &cli.global.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                return fail("output error", format!("{}: {e}", path.display()));
            }
        }
        None => print!("{body}"),
    }
    if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
