//! `tailmean`: batch runner for generalized-mean analyses.

mod commands;
mod config;
mod examples;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use tailmean::genmean::{LambdaSchedule, TruncationSchedule};

use config::{parse_lambda_schedule, parse_schedule, parse_tol, Policies, RunConfig};
use output::{ErrorBody, ErrorReport, Report, TOOL};

#[derive(Debug, Parser)]
#[command(name = "tailmean", version, about = "Generalized means of heavy-tailed measures")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    /// Write the canonical example documents into --out and exit.
    #[arg(long)]
    emit_examples: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Input document (measure, maxent problem or spectral document).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Output directory for the report and CSV series.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Truncation schedule `M0,r,K`.
    #[arg(long, global = true, value_parser = parse_schedule)]
    schedule: Option<TruncationSchedule>,

    /// Multiplier schedule `start,ratio,count`.
    #[arg(long, global = true, value_parser = parse_lambda_schedule)]
    lambda_schedule: Option<LambdaSchedule>,

    /// Centers, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    c_grid: Option<Vec<f64>>,

    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tols: Vec<(String, f64)>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the center-limit behavior of a measure.
    Classify,
    /// Ordinary, weak and doubly weak means plus the tail curve.
    Weakmean,
    /// Multiplier-regularized means over the center grid.
    Multiplier(commands::MultiplierArgs),
    /// Monte Carlo law of large numbers experiments.
    Lln(commands::LlnArgs),
    /// Maximum entropy distribution for a finite problem.
    Maxent,
    /// Axiom checks for sample statistics.
    Axioms(commands::AxiomArgs),
    /// Spectral identities for a matrix and state, or a diagonal bridge report.
    Spectral,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Weakmean => "weakmean",
            Command::Multiplier(_) => "multiplier",
            Command::Lln(_) => "lln",
            Command::Maxent => "maxent",
            Command::Axioms(_) => "axioms",
            Command::Spectral => "spectral",
        }
    }
}

/// What a subcommand hands back for the report.
pub struct Outcome {
    pub results: serde_json::Value,
    pub options: serde_json::Value,
    pub warnings: Vec<String>,
    pub undetermined: bool,
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    use tailmean::Error as E;
    if let Some(e) = err.downcast_ref::<E>() {
        return match e {
            E::InvalidArgument(_) => "invalid_argument",
            E::Construction(_) => "construction",
            E::Quadrature { .. } => "quadrature",
            E::Integrability { .. } => "integrability",
            E::Infeasible { .. } => "infeasible",
            E::DualDivergence { .. } => "dual_divergence",
            E::Redundant { .. } => "redundant",
            E::DimensionMismatch { .. } => "dimension_mismatch",
            E::NotHermitian { .. } => "not_hermitian",
            E::Sampling(_) => "sampling",
        };
    }
    if err.chain().any(|e| e.is::<serde_json::Error>()) {
        return "schema";
    }
    if err.chain().any(|e| e.is::<std::io::Error>()) {
        return "io";
    }
    "usage"
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = cli.global;
    if cli.emit_examples {
        let written = examples::emit(&g.out)?;
        for p in written {
            println!("{}", p.display());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        anyhow::bail!("no subcommand given; see --help");
    };

    let mut policies = Policies::default();
    for (name, value) in &g.tols {
        policies.set(name, *value)?;
    }
    let mut cfg = RunConfig {
        subcommand: command.name().to_string(),
        input: g.input.as_ref().map(|p| p.display().to_string()),
        out: g.out.display().to_string(),
        seed: g.seed,
        schedule: g.schedule.unwrap_or_default(),
        lambda_schedule: g.lambda_schedule.unwrap_or_default(),
        c_grid: g.c_grid.unwrap_or_else(|| tailmean::genmean::DEFAULT_C_GRID.to_vec()),
        policies,
        options: serde_json::Value::Null,
    };

    let started = Instant::now();
    let mut art = output::Artifacts::new(g.out.clone())?;
    let input = g.input.as_deref();
    let outcome = match &command {
        Command::Classify => commands::classify(&cfg, input, &mut art)?,
        Command::Weakmean => commands::weakmean(&cfg, input, &mut art)?,
        Command::Multiplier(a) => commands::multiplier(&cfg, input, a, &mut art)?,
        Command::Lln(a) => commands::lln(&cfg, input, a, &mut art)?,
        Command::Maxent => commands::maxent(&cfg, input)?,
        Command::Axioms(a) => commands::axioms(&cfg, a)?,
        Command::Spectral => commands::spectral(&cfg, input)?,
    };
    cfg.options = outcome.options;

    let report = Report {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg,
        results: outcome.results,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        warnings: outcome.warnings,
    };
    let name = format!("{}.json", command.name());
    art.json(&name, &report)?;
    for p in &art.written {
        println!("{}", p.display());
    }
    Ok(if outcome.undetermined {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let result = match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => Err(anyhow::Error::msg(e.render().to_string().trim_end().to_string())),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            let report = ErrorReport {
                tool: TOOL.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                error: ErrorBody {
                    kind: error_kind(&err).to_string(),
                    message: format!("{err:#}"),
                },
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("error report serializes")
            );
            ExitCode::from(1)
        }
    }
}
