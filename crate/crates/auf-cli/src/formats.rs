//! Text file formats: region files, flat key-value run configuration,
//! generation manifests, decision records and evaluation reports.
//!
//! All formats are line-oriented UTF-8. `#` starts a comment that runs to the
//! end of the line; blank lines are ignored. Floats print with Rust's
//! shortest round-trip representation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use auf_core::benchmarks::NoiseConvention;
use auf_core::estimator::{EstimatorConfig, EtaChoice};
use auf_core::evaluator::{EpisodeProtocol, EpisodeResult, SurrogateGapCurve, TableRow};
use auf_core::kernels::Bandwidths;
use auf_core::optimizer::{ActionBox, DecisionResult, OptimizerConfig};
use auf_core::region::{Constraint, PolytopeRegion};

use crate::{CliError, CliResult};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_f64(tok: &str, what: &str) -> CliResult<f64> {
    tok.parse::<f64>()
        .map_err(|_| CliError::Validation(format!("{what}: not a number: {tok:?}")))
}

fn parse_f64_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| parse_f64(t.trim(), what))
        .collect::<CliResult<Vec<f64>>>()
}

// ---------------------------------------------------------------------------
// Region file
// ---------------------------------------------------------------------------

/// A parsed region file: the polytope plus an optional fixed smoothing scale
/// (absent means adaptive selection).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionFile {
    pub region: PolytopeRegion,
    pub eta: Option<f64>,
}

/// Parse the region file format:
///
/// ```text
/// dy 2
/// constraint 1 0 2      # m_1 ... m_dy  b   (meaning m·y <= b)
/// constraint -1 0 0
/// eta 10                # optional; omit for adaptive selection
/// ```
pub fn parse_region(text: &str) -> CliResult<RegionFile> {
    let mut dy: Option<usize> = None;
    let mut constraints: Vec<Constraint> = Vec::new();
    let mut eta: Option<f64> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match key {
            "dy" => {
                if rest.len() != 1 {
                    return Err(CliError::Validation(format!(
                        "region line {}: dy takes exactly one value",
                        lineno + 1
                    )));
                }
                dy = Some(rest[0].parse().map_err(|_| {
                    CliError::Validation(format!("region line {}: bad dy", lineno + 1))
                })?);
            }
            "constraint" => {
                let dy = dy.ok_or_else(|| {
                    CliError::Validation(format!(
                        "region line {}: dy must come before constraints",
                        lineno + 1
                    ))
                })?;
                if rest.len() != dy + 1 {
                    return Err(CliError::Validation(format!(
                        "region line {}: constraint needs {} numbers (m_1..m_dy b), found {}",
                        lineno + 1,
                        dy + 1,
                        rest.len()
                    )));
                }
                let mut vals = Vec::with_capacity(dy + 1);
                for t in rest {
                    vals.push(parse_f64(t, "region constraint")?);
                }
                let bound = vals.pop().unwrap();
                constraints.push(Constraint {
                    normal: vals,
                    bound,
                });
            }
            "eta" => {
                if rest.len() != 1 {
                    return Err(CliError::Validation(format!(
                        "region line {}: eta takes exactly one value",
                        lineno + 1
                    )));
                }
                eta = Some(parse_f64(rest[0], "region eta")?);
            }
            other => {
                return Err(CliError::Validation(format!(
                    "region line {}: unknown directive {other:?}",
                    lineno + 1
                )));
            }
        }
    }
    let dy = dy.ok_or_else(|| CliError::Validation("region file lacks a dy line".to_string()))?;
    let region = PolytopeRegion::new(dy, constraints)?;
    Ok(RegionFile { region, eta })
}

pub fn render_region(region: &PolytopeRegion, eta: Option<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dy {}", region.dim());
    for c in region.constraints() {
        let coords: Vec<String> = c.normal.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "constraint {} {}", coords.join(" "), c.bound);
    }
    if let Some(eta) = eta {
        let _ = writeln!(out, "eta {eta}");
    }
    out
}

// ---------------------------------------------------------------------------
// Flat key-value run configuration
// ---------------------------------------------------------------------------

/// Parsed `key = value` pairs with dotted keys. Values stay as strings until
/// a consumer interprets them; unknown keys are rejected eagerly.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "estimator.lambda_h",
    "estimator.lambda_x",
    "estimator.eta",
    "estimator.sigma_x",
    "estimator.sigma_u",
    "estimator.sigma_a",
    "estimator.standardize",
    "optimizer.starts",
    "optimizer.learning_rate",
    "optimizer.max_iters",
    "optimizer.grad_tol",
    "optimizer.fallback_seed",
    "optimizer.box_left",
    "optimizer.box_right",
    "evaluation.seeds",
    "evaluation.contexts_per_seed",
    "evaluation.mc_trials",
    "evaluation.dataset_n",
];

impl KeyValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "config line {}: expected key = value, found {line:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(KeyValues { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// True when any estimator setting was supplied (file or flag), in which
    /// case evaluation runs use it instead of the per-benchmark tuned
    /// defaults.
    pub fn has_estimator_keys(&self) -> bool {
        self.entries.keys().any(|k| k.starts_with("estimator."))
    }

    /// Insert a command-line override (flags win over file values).
    pub fn set(&mut self, key: &str, value: String) {
        debug_assert!(KNOWN_KEYS.contains(&key));
        self.entries.insert(key.to_string(), value);
    }

    pub fn f64_opt(&self, key: &str) -> CliResult<Option<f64>> {
        self.get(key).map(|v| parse_f64(v, key)).transpose()
    }

    pub fn usize_opt(&self, key: &str) -> CliResult<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| CliError::Validation(format!("{key}: not a count: {v:?}")))
            })
            .transpose()
    }

    pub fn u64_opt(&self, key: &str) -> CliResult<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| CliError::Validation(format!("{key}: not an integer: {v:?}")))
            })
            .transpose()
    }

    pub fn bool_opt(&self, key: &str) -> CliResult<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(CliError::Validation(format!(
                    "{key}: expected true/false, found {other:?}"
                ))),
            })
            .transpose()
    }

    /// Estimator settings drawn from the `estimator.*` keys.
    pub fn estimator_config(&self) -> CliResult<EstimatorConfig> {
        let eta = match self.get("estimator.eta") {
            None | Some("adaptive") => EtaChoice::Adaptive,
            Some(v) => EtaChoice::Fixed(parse_f64(v, "estimator.eta")?),
        };
        let sigma_x = self.f64_opt("estimator.sigma_x")?;
        let sigma_u = self.f64_opt("estimator.sigma_u")?;
        let sigma_a = self.f64_opt("estimator.sigma_a")?;
        let bandwidths = match (sigma_x, sigma_a) {
            (Some(sx), Some(sa)) => Some(Bandwidths::new(sx, sigma_u, sa)?),
            (None, None) if sigma_u.is_none() => None,
            _ => {
                return Err(CliError::Validation(
                    "estimator.sigma_x and estimator.sigma_a must be given together \
                     (estimator.sigma_u only for data with a pre block)"
                        .to_string(),
                ))
            }
        };
        Ok(EstimatorConfig {
            lambda_h: self.f64_opt("estimator.lambda_h")?,
            lambda_x: self.f64_opt("estimator.lambda_x")?,
            bandwidths,
            eta,
            standardize: self.bool_opt("estimator.standardize")?.unwrap_or(false),
        })
    }

    /// Optimizer settings drawn from the `optimizer.*` keys.
    pub fn optimizer_config(&self) -> CliResult<OptimizerConfig> {
        let defaults = OptimizerConfig::default();
        Ok(OptimizerConfig {
            start_count: self.usize_opt("optimizer.starts")?.unwrap_or(defaults.start_count),
            learning_rate: self
                .f64_opt("optimizer.learning_rate")?
                .unwrap_or(defaults.learning_rate),
            max_iters: self
                .usize_opt("optimizer.max_iters")?
                .unwrap_or(defaults.max_iters),
            grad_tol: self.f64_opt("optimizer.grad_tol")?.unwrap_or(defaults.grad_tol),
            fallback_seed: self
                .u64_opt("optimizer.fallback_seed")?
                .unwrap_or(defaults.fallback_seed),
        })
    }

    /// The action box, when both bounds are present.
    pub fn action_box(&self) -> CliResult<Option<ActionBox>> {
        match (self.get("optimizer.box_left"), self.get("optimizer.box_right")) {
            (Some(lo), Some(hi)) => {
                let lo = parse_f64_list(lo, "optimizer.box_left")?;
                let hi = parse_f64_list(hi, "optimizer.box_right")?;
                Ok(Some(ActionBox::new(lo, hi)?))
            }
            (None, None) => Ok(None),
            _ => Err(CliError::Validation(
                "optimizer.box_left and optimizer.box_right must be given together".to_string(),
            )),
        }
    }

    /// Evaluation protocol from the `evaluation.*` keys.
    pub fn protocol(&self) -> CliResult<EpisodeProtocol> {
        let defaults = EpisodeProtocol::default();
        Ok(EpisodeProtocol {
            dataset_n: self
                .usize_opt("evaluation.dataset_n")?
                .unwrap_or(defaults.dataset_n),
            contexts_per_seed: self
                .usize_opt("evaluation.contexts_per_seed")?
                .unwrap_or(defaults.contexts_per_seed),
            mc_trials: self
                .usize_opt("evaluation.mc_trials")?
                .unwrap_or(defaults.mc_trials),
        })
    }

    pub fn seed_count(&self) -> CliResult<usize> {
        Ok(self.usize_opt("evaluation.seeds")?.unwrap_or(5))
    }
}

// ---------------------------------------------------------------------------
// Generation manifest
// ---------------------------------------------------------------------------

pub fn render_manifest(
    benchmark: &str,
    seed: u64,
    n: usize,
    noise: NoiseConvention,
    region: &PolytopeRegion,
    bounds: &ActionBox,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "benchmark {benchmark}");
    let _ = writeln!(out, "seed {seed}");
    let _ = writeln!(out, "n {n}");
    let _ = writeln!(
        out,
        "noise-convention {}",
        match noise {
            NoiseConvention::Variance => "variance",
            NoiseConvention::StdDev => "std-dev",
        }
    );
    let _ = writeln!(out, "region.dy {}", region.dim());
    for c in region.constraints() {
        let coords: Vec<String> = c.normal.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "region.constraint {} {}", coords.join(" "), c.bound);
    }
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    let _ = writeln!(out, "box.left {}", join(bounds.lo()));
    let _ = writeln!(out, "box.right {}", join(bounds.hi()));
    out
}

// ---------------------------------------------------------------------------
// Decision record
// ---------------------------------------------------------------------------

pub fn render_decision(
    decision: &DecisionResult,
    eta: f64,
    lambda_h: f64,
    lambda_x: f64,
    bandwidths: &Bandwidths,
) -> String {
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = String::new();
    let _ = writeln!(out, "a_star {}", join(&decision.a_star));
    let _ = writeln!(out, "j_star {}", decision.j_star);
    let _ = writeln!(out, "eta {eta}");
    let _ = writeln!(out, "lambda_h {lambda_h}");
    let _ = writeln!(out, "lambda_x {lambda_x}");
    let _ = writeln!(out, "sigma_x {}", bandwidths.sigma_x());
    if let Ok(su) = bandwidths.sigma_u() {
        let _ = writeln!(out, "sigma_u {su}");
    }
    let _ = writeln!(out, "sigma_a {}", bandwidths.sigma_a());
    let _ = writeln!(out, "starts_used {}", decision.starts.len());
    for (i, rec) in decision.starts.iter().enumerate() {
        let origin = match rec.train_index {
            Some(idx) => format!("row:{idx}"),
            None => "fallback".to_string(),
        };
        let _ = writeln!(
            out,
            "start {i} origin {origin} action {} value {} best {} iterations {}",
            join(&rec.start),
            rec.start_value,
            rec.best_value,
            rec.iterations
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Evaluation reports
// ---------------------------------------------------------------------------

/// One record per scored (seed, context): tab-separated with a header line.
pub fn render_episodes(results: &[EpisodeResult]) -> String {
    let mut out = String::from(
        "benchmark\tmethod\tseed\tcontext_index\tauf_probability\tsuccesses\tmc_trials\taction\tcontext\n",
    );
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    for r in results {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.benchmark.as_str(),
            r.method.as_str(),
            r.seed,
            r.context_index,
            r.auf_probability(),
            r.successes,
            r.mc_trials,
            r.action.as_ref().map_or_else(|| "-".to_string(), |a| join(a)),
            join(&r.context),
        );
    }
    out
}

/// Aggregate rows: per-seed means plus cross-seed mean and std.
pub fn render_aggregate(rows: &[TableRow]) -> String {
    let mut out = String::from("benchmark\tmethod\tmean\tstd\tper_seed_means\n");
    for r in rows {
        let seeds: Vec<String> = r.per_seed_means.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.benchmark.as_str(),
            r.method.as_str(),
            r.mean,
            r.std,
            seeds.join(",")
        );
    }
    out
}

pub fn render_gap_curve(curve: &SurrogateGapCurve) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# reference {}", curve.reference);
    let _ = writeln!(out, "# quadrature_reference {}", curve.quadrature_reference);
    out.push_str("eta\tgap\n");
    for (eta, gap) in &curve.points {
        let _ = writeln!(out, "{eta}\t{gap}");
    }
    out
}

pub fn render_consistency_curve(curve: &[(usize, f64)]) -> String {
    let mut out = String::from("n\tmedian_abs_error\n");
    for (n, err) in curve {
        let _ = writeln!(out, "{n}\t{err}");
    }
    out
}
