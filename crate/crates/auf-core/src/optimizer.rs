//! Multi-start projected gradient ascent over the feasible action box.
//!
//! The objective is a weighted sum of Gaussian bumps with mixed-sign weights,
//! so random initialization risks poor local maxima. Starts are instead the
//! historical actions with the largest positive weights ω_i(x), up to the
//! configured count. Each start runs fixed-step ascent with projection onto
//! the box before every evaluation, tracking the best iterate ever evaluated;
//! the returned decision is the best iterate across all starts.

use alloc::vec::Vec;

use crate::estimator::{ContextWeights, FittedNestedEstimator};
use crate::linalg::Mat;
use crate::math::norm2;
use crate::rng::Rng;
use crate::{Error, Result};

/// Elementwise feasible range `lo ⪯ a ⪯ hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ActionBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                what: "action box bounds",
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for (i, (&l, &h)) in lo.iter().zip(hi.iter()).enumerate() {
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(Error::Schema(alloc::format!(
                    "invalid box bounds at component {i}: [{l}, {h}]"
                )));
            }
        }
        Ok(ActionBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, a: &[f64]) -> bool {
        a.len() == self.dim()
            && a.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(&v, (&l, &h))| v >= l && v <= h)
    }

    /// First component outside the box, if any.
    pub fn violation(&self, a: &[f64]) -> Option<(usize, f64, f64, f64)> {
        for (i, &v) in a.iter().enumerate() {
            if v < self.lo[i] || v > self.hi[i] {
                return Some((i, v, self.lo[i], self.hi[i]));
            }
        }
        None
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(&l, &h)| 0.5 * (l + h))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Number of multi-start points K.
    pub start_count: usize,
    /// Fixed ascent step ν.
    pub learning_rate: f64,
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Early stop once ‖∇Ĵ‖ falls to or below this.
    pub grad_tol: f64,
    /// Seed for the quasi-uniform fallback start set used when no ω_i > 0.
    pub fallback_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            start_count: 20,
            learning_rate: 0.2,
            max_iters: 200,
            grad_tol: 1e-7,
            fallback_seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.start_count < 1 {
            return Err(Error::NonPositive {
                what: "optimizer start_count",
                value: self.start_count as f64,
            });
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::NonPositive {
                what: "optimizer learning_rate",
                value: self.learning_rate,
            });
        }
        if self.max_iters < 1 {
            return Err(Error::NonPositive {
                what: "optimizer max_iters",
                value: self.max_iters as f64,
            });
        }
        Ok(())
    }
}

/// Diagnostics for one ascent run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartRecord {
    /// Training row the start came from; `None` for fallback starts.
    pub train_index: Option<usize>,
    /// The (projected) starting point actually evaluated.
    pub start: Vec<f64>,
    /// Objective at the starting point.
    pub start_value: f64,
    /// Best objective seen along this start's trajectory.
    pub best_value: f64,
    /// Ascent steps taken before the cap or the gradient test stopped it.
    pub iterations: usize,
}

/// Outcome of the multi-start search.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionResult {
    pub a_star: Vec<f64>,
    pub j_star: f64,
    pub starts: Vec<StartRecord>,
}

/// Historical actions whose weight is strictly positive, ranked by weight
/// descending (ties to the lower row index), truncated to `k`.
pub fn select_starts(omega: &[f64], actions: &Mat, k: usize) -> Vec<Vec<f64>> {
    assert_eq!(
        omega.len(),
        actions.n_rows(),
        "weights and action rows must agree"
    );
    ranked_positive_indices(omega, k)
        .into_iter()
        .map(|i| actions.row(i).to_vec())
        .collect()
}

fn ranked_positive_indices(omega: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..omega.len()).filter(|&i| omega[i] > 0.0).collect();
    // Stable order: weight descending, then lower index.
    idx.sort_by(|&a, &b| {
        omega[b]
            .partial_cmp(&omega[a])
            .expect("weights are finite")
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

/// Elementwise clamp onto the box; idempotent.
pub fn project_box(a: &[f64], bounds: &ActionBox) -> Vec<f64> {
    assert_eq!(a.len(), bounds.dim(), "projection dimension mismatch");
    a.iter()
        .zip(bounds.lo.iter().zip(bounds.hi.iter()))
        .map(|(&v, (&l, &h))| v.clamp(l, h))
        .collect()
}

/// Quasi-uniform fallback starts: the box midpoint plus `count - 1` points of
/// a seeded additive low-discrepancy sequence.
fn fallback_starts(bounds: &ActionBox, count: usize, seed: u64) -> Vec<Vec<f64>> {
    const FALLBACK_TAG: u64 = 0x0f;
    let d = bounds.dim();
    let mut starts = Vec::with_capacity(count);
    starts.push(bounds.midpoint());
    if count <= 1 {
        return starts;
    }
    // Irrational per-dimension increments frac(sqrt(p_j)) over the primes.
    let mut alphas = Vec::with_capacity(d);
    let mut offsets = Vec::with_capacity(d);
    let mut p = 2u64;
    for j in 0..d {
        let s = libm::sqrt(p as f64);
        alphas.push(s - libm::floor(s));
        offsets.push(Rng::substream(seed, &[FALLBACK_TAG, j as u64]).uniform());
        p = next_prime(p);
    }
    for i in 1..count {
        let point: Vec<f64> = (0..d)
            .map(|j| {
                let t = offsets[j] + i as f64 * alphas[j];
                let frac = t - libm::floor(t);
                bounds.lo[j] + (bounds.hi[j] - bounds.lo[j]) * frac
            })
            .collect();
        starts.push(point);
    }
    starts
}

fn next_prime(after: u64) -> u64 {
    let mut n = after + 1;
    loop {
        let mut is_prime = n >= 2;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                is_prime = false;
                break;
            }
            d += 1;
        }
        if is_prime {
            return n;
        }
        n += 1;
    }
}

/// Multi-start projected gradient ascent. Every evaluated iterate lies in the
/// box; the result is the best iterate seen across all starts, so
/// `j_star >= Ĵ(s)` for every start `s`. Ties resolve to the earliest start.
pub fn optimize(
    est: &FittedNestedEstimator,
    weights: &ContextWeights,
    bounds: &ActionBox,
    config: &OptimizerConfig,
) -> Result<DecisionResult> {
    config.validate()?;
    if bounds.dim() != est.action_dim() {
        return Err(Error::DimensionMismatch {
            what: "action box dimension",
            expected: est.action_dim(),
            got: bounds.dim(),
        });
    }

    let ranked = ranked_positive_indices(&weights.omega, config.start_count);
    let starts: Vec<(Option<usize>, Vec<f64>)> = if ranked.is_empty() {
        fallback_starts(bounds, config.start_count, config.fallback_seed)
            .into_iter()
            .map(|s| (None, s))
            .collect()
    } else {
        ranked
            .into_iter()
            .map(|i| (Some(i), est.actions_raw().row(i).to_vec()))
            .collect()
    };

    let mut best_value = f64::NEG_INFINITY;
    let mut best_point: Vec<f64> = Vec::new();
    let mut records = Vec::with_capacity(starts.len());

    for (train_index, raw_start) in starts {
        let mut a = project_box(&raw_start, bounds);
        let start_value = est.objective(weights, &a)?;
        let mut local_best = start_value;
        if start_value > best_value {
            best_value = start_value;
            best_point = a.clone();
        }
        let mut iterations = 0usize;
        let start = a.clone();
        for _ in 0..config.max_iters {
            let grad = est.gradient(weights, &a)?;
            if norm2(&grad) <= config.grad_tol {
                break;
            }
            for (ai, gi) in a.iter_mut().zip(grad.iter()) {
                *ai += config.learning_rate * gi;
            }
            a = project_box(&a, bounds);
            iterations += 1;
            let value = est.objective(weights, &a)?;
            if value > local_best {
                local_best = value;
            }
            if value > best_value {
                best_value = value;
                best_point = a.clone();
            }
        }
        records.push(StartRecord {
            train_index,
            start,
            start_value,
            best_value: local_best,
            iterations,
        });
    }

    Ok(DecisionResult {
        a_star: best_point,
        j_star: best_value,
        starts: records,
    })
}
