use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use auf_cli::commands::{self, DecideArgs, EvaluateArgs, GenerateArgs};
use auf_cli::{CliError, CliResult};

/// Rehearsal-learning decision toolkit: synthetic benchmark generation,
/// observational fitting with feasible-action optimization, and Monte Carlo
/// evaluation.
#[derive(Parser)]
#[command(name = "auf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an observational dataset from a benchmark oracle.
    Generate(GenerateCli),
    /// Fit on a dataset and pick the best feasible alteration for a context.
    Decide(DecideCli),
    /// Run the evaluation harness (table reproduction or named checks).
    Evaluate(EvaluateCli),
}

#[derive(Args)]
struct GenerateCli {
    /// Benchmark id: lin-syn1 | non-syn1 | non-syn2 | bank-exp.
    #[arg(long)]
    bench: String,
    /// Number of rows to sample.
    #[arg(long)]
    n: usize,
    /// Generation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (the manifest lands next to it).
    #[arg(long)]
    out: PathBuf,
    /// Normal-noise convention: std-dev (default) or variance.
    #[arg(long)]
    noise: Option<String>,
}

#[derive(Args)]
struct DecideCli {
    /// Observational dataset CSV with a name:role header.
    #[arg(long)]
    data: PathBuf,
    /// Schema file overriding the header roles (same name:role line format).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Region file (dy / constraint / optional eta lines).
    #[arg(long)]
    region: PathBuf,
    /// Observed context, comma-separated.
    #[arg(long)]
    context: String,
    /// Feasible box lower bounds, comma-separated.
    #[arg(long)]
    box_left: Option<String>,
    /// Feasible box upper bounds, comma-separated.
    #[arg(long)]
    box_right: Option<String>,
    /// Decision record output path.
    #[arg(long)]
    out: PathBuf,
    /// Flat key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Estimator variant: nested (default) or conditional.
    #[arg(long)]
    method: Option<String>,
    /// Also save the fitted estimator artifact here.
    #[arg(long)]
    save_estimator: Option<PathBuf>,
    /// Extra configuration overrides as key=value (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct EvaluateCli {
    /// Reproduce the aggregate table.
    #[arg(long, value_name = "TARGET", conflicts_with = "check")]
    reproduce: Option<String>,
    /// Run a named check: thm1 | thm2 | ablation.
    #[arg(long, value_name = "CHECK")]
    check: Option<String>,
    /// Directory for the report files.
    #[arg(long)]
    out_dir: PathBuf,
    /// Flat key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of seeds (0..k).
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated benchmark ids (default: all four).
    #[arg(long)]
    benchmarks: Option<String>,
    /// Normal-noise convention: std-dev (default) or variance.
    #[arg(long)]
    noise: Option<String>,
    /// Probe count for the consistency check.
    #[arg(long)]
    probes: Option<usize>,
    /// Training sizes for the consistency check, comma-separated.
    #[arg(long)]
    sizes: Option<String>,
    /// Smoothing scales for the surrogate-gap check, comma-separated.
    #[arg(long)]
    etas: Option<String>,
    /// Base seed for the consistency check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra configuration overrides as key=value (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn parse_overrides(pairs: &[String]) -> CliResult<Vec<(String, String)>> {
    pairs
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Validation(format!("--set expects key=value, got {p:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(g) => commands::cmd_generate(&GenerateArgs {
            benchmark: g.bench,
            n: g.n,
            seed: g.seed,
            out: g.out,
            noise: g.noise,
        }),
        Command::Decide(d) => commands::cmd_decide(&DecideArgs {
            data: d.data,
            schema: d.schema,
            region: d.region,
            context: d.context,
            box_left: d.box_left,
            box_right: d.box_right,
            out: d.out,
            config: d.config,
            method: d.method,
            save_estimator: d.save_estimator,
            overrides: parse_overrides(&d.set)?,
        }),
        Command::Evaluate(e) => {
            let target = match (&e.reproduce, &e.check) {
                (Some(t), None) => t.clone(),
                (None, Some(c)) => c.clone(),
                (None, None) => {
                    return Err(CliError::Validation(
                        "evaluate needs --reproduce table1 or --check thm1|thm2|ablation"
                            .to_string(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            commands::cmd_evaluate(&EvaluateArgs {
                target,
                out_dir: e.out_dir,
                config: e.config,
                seeds: e.seeds,
                benchmarks: e.benchmarks,
                noise: e.noise,
                probes: e.probes,
                sizes: e.sizes,
                etas: e.etas,
                seed: e.seed,
                overrides: parse_overrides(&e.set)?,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
