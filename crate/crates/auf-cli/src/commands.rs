//! The three subcommand implementations. Each validates all of its inputs
//! and finishes every computation before the first output file is written,
//! so failures never leave partial artifacts behind.

use std::path::PathBuf;

use auf_core::benchmarks::{BenchmarkId, BenchmarkOracle, NoiseConvention};
use auf_core::dataset::ObservationalDataset;
use auf_core::estimator::{fit, fit_conditional};
use auf_core::evaluator::{
    ablation_comparison, consistency_curve, reproduce_table, surrogate_gap_curve,
    tuned_estimator_config, Method,
};
use auf_core::optimizer::{optimize, ActionBox};

use crate::formats::{self, KeyValues};
use crate::{artifact, read_text, write_atomic, CliError, CliResult};

fn parse_noise(s: &str) -> CliResult<NoiseConvention> {
    match s {
        "variance" => Ok(NoiseConvention::Variance),
        "std-dev" | "stddev" => Ok(NoiseConvention::StdDev),
        other => Err(CliError::Validation(format!(
            "unknown noise convention {other:?} (expected variance|std-dev)"
        ))),
    }
}

fn parse_benchmark(s: &str) -> CliResult<BenchmarkId> {
    BenchmarkId::parse(s).map_err(|_| {
        let ids: Vec<&str> = BenchmarkId::ALL.iter().map(|b| b.as_str()).collect();
        CliError::Validation(format!(
            "unknown benchmark {s:?}; valid ids: {}",
            ids.join(", ")
        ))
    })
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

pub struct GenerateArgs {
    pub benchmark: String,
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub noise: Option<String>,
}

/// Sample an observational dataset from a benchmark oracle and write the CSV
/// plus a manifest recording the generation settings, region and action box.
pub fn cmd_generate(args: &GenerateArgs) -> CliResult<()> {
    let id = parse_benchmark(&args.benchmark)?;
    let noise = args
        .noise
        .as_deref()
        .map(parse_noise)
        .transpose()?
        .unwrap_or_default();
    let oracle = BenchmarkOracle::with_noise(id, noise);
    let dataset = oracle.generate_observational(args.n, args.seed)?;

    let csv = dataset.to_csv();
    let manifest = formats::render_manifest(
        id.as_str(),
        args.seed,
        args.n,
        noise,
        oracle.region(),
        oracle.action_box(),
    );
    write_atomic(&args.out, &csv)?;
    write_atomic(&args.out.with_extension("manifest"), &manifest)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// decide
// ---------------------------------------------------------------------------

pub struct DecideArgs {
    pub data: PathBuf,
    /// Optional role-schema override for the dataset header.
    pub schema: Option<PathBuf>,
    pub region: PathBuf,
    pub context: String,
    pub box_left: Option<String>,
    pub box_right: Option<String>,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub method: Option<String>,
    pub save_estimator: Option<PathBuf>,
    /// `key=value` overrides applied on top of the config file.
    pub overrides: Vec<(String, String)>,
}

/// Fit on an observational CSV, compute the context weights, run the
/// multi-start search over the feasible box and write the decision record.
pub fn cmd_decide(args: &DecideArgs) -> CliResult<()> {
    let mut kv = match &args.config {
        Some(path) => KeyValues::parse(&read_text(path)?)?,
        None => KeyValues::default(),
    };
    for (key, value) in &args.overrides {
        kv.set(key, value.clone());
    }
    if let Some(lo) = &args.box_left {
        kv.set("optimizer.box_left", lo.clone());
    }
    if let Some(hi) = &args.box_right {
        kv.set("optimizer.box_right", hi.clone());
    }

    let csv = read_text(&args.data)?;
    let dataset = match &args.schema {
        None => ObservationalDataset::parse_csv(&csv)?,
        Some(path) => {
            let text = read_text(path)?;
            let line = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .ok_or_else(|| CliError::validation("schema file has no header line"))?;
            let schema = auf_core::dataset::VariableSchema::parse_header(line)?;
            ObservationalDataset::parse_csv_with_schema(&csv, schema)?
        }
    };
    let region_file = formats::parse_region(&read_text(&args.region)?)?;

    let mut est_config = kv.estimator_config()?;
    // A fixed η in the region file applies unless the config pins one.
    if let Some(eta) = region_file.eta {
        if kv.get("estimator.eta").is_none() {
            est_config.eta = auf_core::estimator::EtaChoice::Fixed(eta);
        }
    }
    let opt_config = kv.optimizer_config()?;
    let bounds: ActionBox = kv.action_box()?.ok_or_else(|| {
        CliError::Validation(
            "the feasible action box is required: pass --box-left/--box-right or set \
             optimizer.box_left/optimizer.box_right"
                .to_string(),
        )
    })?;

    let context: Vec<f64> = args
        .context
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("context: not a number: {t:?}")))
        })
        .collect::<CliResult<_>>()?;

    let method = match args.method.as_deref() {
        None | Some("nested") => Method::Nested,
        Some("conditional") => Method::Conditional,
        Some(other) => {
            return Err(CliError::Validation(format!(
                "unknown method {other:?} (expected nested|conditional)"
            )))
        }
    };
    let estimator = match method {
        Method::Nested => fit(&dataset, &region_file.region, &est_config)?,
        Method::Conditional => fit_conditional(&dataset, &region_file.region, &est_config)?,
        Method::NoAction => unreachable!(),
    };
    let weights = estimator.context_weights(&context)?;
    let decision = optimize(&estimator, &weights, &bounds, &opt_config)?;

    let record = formats::render_decision(
        &decision,
        estimator.eta(),
        estimator.lambda_h(),
        estimator.lambda_x(),
        estimator.bandwidths(),
    );
    if let Some(path) = &args.save_estimator {
        write_atomic(path, &artifact::render_estimator(&estimator))?;
    }
    write_atomic(&args.out, &record)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

pub struct EvaluateArgs {
    /// `table1` reproduction, or a named check: `thm1`, `thm2`, `ablation`.
    pub target: String,
    pub out_dir: PathBuf,
    pub config: Option<PathBuf>,
    pub seeds: Option<usize>,
    pub benchmarks: Option<String>,
    pub noise: Option<String>,
    pub probes: Option<usize>,
    pub sizes: Option<String>,
    pub etas: Option<String>,
    pub seed: u64,
    pub overrides: Vec<(String, String)>,
}

/// Drive the evaluation harness and write per-episode plus aggregate reports.
pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let mut kv = match &args.config {
        Some(path) => KeyValues::parse(&read_text(path)?)?,
        None => KeyValues::default(),
    };
    for (key, value) in &args.overrides {
        kv.set(key, value.clone());
    }
    let noise = args
        .noise
        .as_deref()
        .map(parse_noise)
        .transpose()?
        .unwrap_or_default();
    let est_config = kv.estimator_config()?;
    let opt_config = kv.optimizer_config()?;
    let protocol = kv.protocol()?;
    let seed_count = args.seeds.unwrap_or(kv.seed_count()?);
    let seeds: Vec<u64> = (0..seed_count as u64).collect();

    // Everything is computed before the first byte lands on disk; a failed
    // run leaves no partial artifacts.
    let out = |name: &str| -> CliResult<PathBuf> {
        std::fs::create_dir_all(&args.out_dir).map_err(|e| {
            CliError::Validation(format!("cannot create {}: {e}", args.out_dir.display()))
        })?;
        Ok(args.out_dir.join(name))
    };

    match args.target.as_str() {
        "table1" => {
            let oracles: Vec<BenchmarkOracle> = match &args.benchmarks {
                None => BenchmarkId::ALL
                    .iter()
                    .map(|&id| BenchmarkOracle::with_noise(id, noise))
                    .collect(),
                Some(list) => list
                    .split(',')
                    .map(|s| Ok(BenchmarkOracle::with_noise(parse_benchmark(s.trim())?, noise)))
                    .collect::<CliResult<_>>()?,
            };
            let use_tuned = !kv.has_estimator_keys();
            let (rows, episodes) = reproduce_table(
                &oracles,
                &[Method::NoAction, Method::Nested],
                &seeds,
                |o| {
                    if use_tuned {
                        tuned_estimator_config(o.id())
                    } else {
                        est_config.clone()
                    }
                },
                &opt_config,
                &protocol,
            )?;
            write_atomic(&out("episodes.tsv")?, &formats::render_episodes(&episodes))?;
            write_atomic(&out("aggregate.tsv")?, &formats::render_aggregate(&rows))?;
        }
        "thm1" => {
            let etas: Vec<f64> = match &args.etas {
                None => vec![5.0, 10.0, 20.0, 50.0, 100.0],
                Some(list) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Validation(format!("bad eta {t:?}")))
                    })
                    .collect::<CliResult<_>>()?,
            };
            let curve = surrogate_gap_curve(&etas)?;
            write_atomic(&out("thm1_gap.tsv")?, &formats::render_gap_curve(&curve))?;
        }
        "thm2" => {
            let sizes: Vec<usize> = match &args.sizes {
                None => vec![100, 400, 1600],
                Some(list) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| CliError::Validation(format!("bad size {t:?}")))
                    })
                    .collect::<CliResult<_>>()?,
            };
            let probes = args.probes.unwrap_or(20);
            let curve = consistency_curve(&sizes, probes, args.seed)?;
            write_atomic(
                &out("thm2_consistency.tsv")?,
                &formats::render_consistency_curve(&curve),
            )?;
        }
        "ablation" => {
            let bank_config = if kv.has_estimator_keys() {
                est_config.clone()
            } else {
                tuned_estimator_config(auf_core::benchmarks::BenchmarkId::BankExp)
            };
            let rows = ablation_comparison(&seeds, &bank_config, &opt_config, &protocol)?;
            write_atomic(
                &out("ablation_aggregate.tsv")?,
                &formats::render_aggregate(&rows),
            )?;
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown evaluation target {other:?} (expected table1|thm1|thm2|ablation)"
            )));
        }
    }
    Ok(())
}
