//! The nested kernel-ridge estimator of the smoothed decision objective.
//!
//! Fitting is a one-time offline stage. Stage 1 solves
//! `(K_hh + Nλ_h I) α = w_η` over the joint kernel on (x, u, a), folding the
//! desirability of historical outcomes into the coefficient vector α. Stage 2
//! holds a factorization of `(K_xx + Nλ_x I)` whose per-context solve yields
//! γ(x); the product `K_uu γ(x)` re-weights each historical sample by how
//! well its pre-alteration covariates match the covariate profile expected
//! under the current context, which is what corrects for covariates that
//! influenced both the historical actions and the outcomes.
//!
//! Per context, ω(x) = α ⊙ k_x(x) ⊙ (K_uu γ(x)), and the objective is the
//! weighted sum of Gaussian bumps centered at the historical actions:
//! `Ĵ(a; x) = ω(x)ᵀ k_a(a)`. With no pre-alteration block the adjustment
//! factor is the all-ones vector (not a degenerate Gram product): no
//! adjustment is required, and the estimator reduces to the plain
//! conditional form.
//!
//! [`fit_conditional`] builds the deliberately unadjusted ablation variant:
//! the joint kernel drops the u block everywhere and stage 2 is skipped, so
//! it estimates the conditional rather than the post-alteration expectation.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{positive_fraction, ObservationalDataset};
use crate::kernels::{kernel_vector, Bandwidths, GramMatrix, RidgeFactor};
use crate::kernels::{median_heuristic, rbf_unchecked};
use crate::linalg::Mat;
use crate::region::{select_eta, PolytopeRegion, SmoothedDesirability};
use crate::{Error, Result};

/// Smoothing scale: fixed, or chosen from the training positive fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaChoice {
    Fixed(f64),
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Stage-1 regularization; `None` means the `N^(-1/4)` schedule.
    pub lambda_h: Option<f64>,
    /// Stage-2 regularization; `None` means the `N^(-1/2)` schedule.
    pub lambda_x: Option<f64>,
    /// Explicit bandwidths; `None` means the per-block median heuristic.
    pub bandwidths: Option<Bandwidths>,
    pub eta: EtaChoice,
    /// Z-score each block's columns with training statistics before any
    /// kernel evaluation.
    pub standardize: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            lambda_h: None,
            lambda_x: None,
            bandwidths: None,
            eta: EtaChoice::Adaptive,
            standardize: false,
        }
    }
}

/// Which expectation the fitted surface estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Adjusted (post-alteration) objective via the two-stage pipeline.
    Nested,
    /// Unadjusted conditional expectation: u excluded, stage 2 skipped.
    Conditional,
}

/// Per-column location/scale used when standardization is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ColumnStats {
    fn fit(m: &Mat) -> Self {
        let n = m.n_rows() as f64;
        let mut mean = vec![0.0; m.n_cols()];
        let mut std = vec![0.0; m.n_cols()];
        for j in 0..m.n_cols() {
            let mut s = 0.0;
            for i in 0..m.n_rows() {
                s += m.get(i, j);
            }
            mean[j] = s / n;
            let mut v = 0.0;
            for i in 0..m.n_rows() {
                let d = m.get(i, j) - mean[j];
                v += d * d;
            }
            let var = if m.n_rows() > 1 { v / (n - 1.0) } else { 0.0 };
            let sd = libm::sqrt(var);
            // Constant columns pass through unscaled.
            std[j] = if sd > 0.0 { sd } else { 1.0 };
        }
        ColumnStats { mean, std }
    }

    fn transform_mat(&self, m: &Mat) -> Mat {
        Mat::from_fn(m.n_rows(), m.n_cols(), |i, j| {
            (m.get(i, j) - self.mean[j]) / self.std[j]
        })
    }

    fn transform_vec(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.mean.iter().zip(self.std.iter()))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

/// Training statistics for the three input blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub x: ColumnStats,
    pub u: ColumnStats,
    pub a: ColumnStats,
}

/// Frozen result of the offline fit. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FittedNestedEstimator {
    kind: EstimatorKind,
    // Training blocks in original units.
    x_raw: Mat,
    u_raw: Mat,
    a_raw: Mat,
    // Blocks in kernel coordinates (standardized when enabled). The u block
    // is folded into `k_uu` and not kept separately.
    x_kern: Mat,
    a_kern: Mat,
    standardizer: Option<Standardizer>,
    bandwidths: Bandwidths,
    lambda_h: f64,
    lambda_x: f64,
    eta: f64,
    alpha: Vec<f64>,
    /// Stage-2 solve operator for `(K_xx + Nλ_x I)`; absent in the
    /// conditional variant, where stage 2 is skipped.
    stage2: Option<RidgeFactor>,
    /// Gram over the pre-alteration block; the adjustment acts as the
    /// all-ones vector when this is absent (no u block, or conditional mode).
    k_uu: Option<GramMatrix>,
    config: EstimatorConfig,
}

/// Context-specific mixing weights computed once per observed context.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextWeights {
    /// The context this was computed for, in original units.
    pub x: Vec<f64>,
    /// `k_x(x_i, x)` over the training contexts.
    pub k_x_vec: Vec<f64>,
    /// Stage-2 coefficients γ(x); `None` when stage 2 is skipped.
    pub gamma: Option<Vec<f64>>,
    /// `K_uu γ(x)`, or all-ones when no adjustment applies.
    pub adjustment: Vec<f64>,
    /// `α ⊙ k_x(x) ⊙ adjustment`.
    pub omega: Vec<f64>,
}

/// Fit the nested estimator (offline stage).
pub fn fit(
    dataset: &ObservationalDataset,
    region: &PolytopeRegion,
    config: &EstimatorConfig,
) -> Result<FittedNestedEstimator> {
    fit_impl(dataset, region, config, EstimatorKind::Nested)
}

/// Fit the unadjusted single-estimator ablation: the joint kernel uses only
/// the (x, a) blocks and the adjustment factor is identically one.
pub fn fit_conditional(
    dataset: &ObservationalDataset,
    region: &PolytopeRegion,
    config: &EstimatorConfig,
) -> Result<FittedNestedEstimator> {
    fit_impl(dataset, region, config, EstimatorKind::Conditional)
}

fn fit_impl(
    dataset: &ObservationalDataset,
    region: &PolytopeRegion,
    config: &EstimatorConfig,
    kind: EstimatorKind,
) -> Result<FittedNestedEstimator> {
    let blocks = dataset.blocks();
    let n = dataset.n();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if blocks.a.n_cols() == 0 {
        return Err(Error::Schema("actionable block is empty".into()));
    }
    if blocks.y.n_cols() != region.dim() {
        return Err(Error::DimensionMismatch {
            what: "region outcome dimension",
            expected: blocks.y.n_cols(),
            got: region.dim(),
        });
    }

    let x_raw = blocks.x;
    let a_raw = blocks.a;
    // The conditional variant never sees the pre-alteration block.
    let u_raw = match kind {
        EstimatorKind::Nested => blocks.u,
        EstimatorKind::Conditional => Mat::zeros(n, 0),
    };
    let d_u = u_raw.n_cols();

    let standardizer = if config.standardize {
        Some(Standardizer {
            x: ColumnStats::fit(&x_raw),
            u: ColumnStats::fit(&u_raw),
            a: ColumnStats::fit(&a_raw),
        })
    } else {
        None
    };
    let (x_kern, u_kern, a_kern) = match &standardizer {
        Some(s) => (
            s.x.transform_mat(&x_raw),
            s.u.transform_mat(&u_raw),
            s.a.transform_mat(&a_raw),
        ),
        None => (x_raw.clone(), u_raw.clone(), a_raw.clone()),
    };

    let bandwidths = match &config.bandwidths {
        Some(bw) => {
            if d_u > 0 {
                bw.sigma_u()?;
            }
            *bw
        }
        None => Bandwidths::new(
            median_heuristic(&x_kern)?,
            if d_u > 0 {
                Some(median_heuristic(&u_kern)?)
            } else {
                None
            },
            median_heuristic(&a_kern)?,
        )?,
    };

    let eta = match config.eta {
        EtaChoice::Fixed(v) => {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::NonPositive {
                    what: "eta",
                    value: v,
                });
            }
            v
        }
        EtaChoice::Adaptive => select_eta(positive_fraction(dataset, region)?)?,
    };

    let lambda_h = config
        .lambda_h
        .unwrap_or_else(|| libm::pow(n as f64, -0.25));
    let lambda_x = config.lambda_x.unwrap_or_else(|| libm::pow(n as f64, -0.5));

    let desirability = SmoothedDesirability::new(region.clone(), eta)?;
    let w_eta = desirability.values(&blocks.y)?;

    // Stage 1: αᵀ = w_ηᵀ (K_hh + Nλ_h I)⁻¹, via the symmetric solve.
    let k_hh = GramMatrix::from_joint_samples(&x_kern, &u_kern, &a_kern, &bandwidths)?;
    let alpha = RidgeFactor::new(&k_hh, lambda_h, n)?.solve(&w_eta)?;

    // Stage 2: hold (K_xx + Nλ_x I) as a factorization; γ(x) is a per-context solve.
    let (stage2, k_uu) = match kind {
        EstimatorKind::Nested => {
            let k_xx = GramMatrix::from_samples(&x_kern, bandwidths.sigma_x())?;
            let stage2 = RidgeFactor::new(&k_xx, lambda_x, n)?;
            let k_uu = if d_u > 0 {
                Some(GramMatrix::from_samples(&u_kern, bandwidths.sigma_u()?)?)
            } else {
                None
            };
            (Some(stage2), k_uu)
        }
        EstimatorKind::Conditional => (None, None),
    };

    Ok(FittedNestedEstimator {
        kind,
        x_raw,
        u_raw,
        a_raw,
        x_kern,
        a_kern,
        standardizer,
        bandwidths,
        lambda_h,
        lambda_x,
        eta,
        alpha,
        stage2,
        k_uu,
        config: config.clone(),
    })
}

impl FittedNestedEstimator {
    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn context_dim(&self) -> usize {
        self.x_raw.n_cols()
    }

    pub fn pre_dim(&self) -> usize {
        self.u_raw.n_cols()
    }

    pub fn action_dim(&self) -> usize {
        self.a_raw.n_cols()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lambda_h(&self) -> f64 {
        self.lambda_h
    }

    pub fn lambda_x(&self) -> f64 {
        self.lambda_x
    }

    pub fn bandwidths(&self) -> &Bandwidths {
        &self.bandwidths
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    /// Training contexts in original units.
    pub fn contexts_raw(&self) -> &Mat {
        &self.x_raw
    }

    /// Training pre-alteration covariates in original units (width 0 when
    /// absent or in the conditional variant).
    pub fn pre_raw(&self) -> &Mat {
        &self.u_raw
    }

    /// Training actions in original units; multi-start seeds come from here.
    pub fn actions_raw(&self) -> &Mat {
        &self.a_raw
    }

    /// Compute the context-specific weights ω(x) (per-context stage).
    pub fn context_weights(&self, x: &[f64]) -> Result<ContextWeights> {
        if x.len() != self.context_dim() {
            return Err(Error::DimensionMismatch {
                what: "context vector",
                expected: self.context_dim(),
                got: x.len(),
            });
        }
        let x_k = match &self.standardizer {
            Some(s) => s.x.transform_vec(x),
            None => x.to_vec(),
        };
        let k_x_vec = kernel_vector(&self.x_kern, &x_k, self.bandwidths.sigma_x())?;
        let gamma = match &self.stage2 {
            Some(g) => Some(g.solve(&k_x_vec)?),
            None => None,
        };
        let adjustment = match (&self.k_uu, &gamma) {
            (Some(k_uu), Some(gamma)) => k_uu.matvec(gamma),
            _ => vec![1.0; self.n()],
        };
        let omega = self
            .alpha
            .iter()
            .zip(k_x_vec.iter().zip(adjustment.iter()))
            .map(|(a, (k, adj))| a * k * adj)
            .collect();
        Ok(ContextWeights {
            x: x.to_vec(),
            k_x_vec,
            gamma,
            adjustment,
            omega,
        })
    }

    /// `Ĵ(a; x) = Σ_i ω_i k_a(a_i, a)`.
    pub fn objective(&self, weights: &ContextWeights, a: &[f64]) -> Result<f64> {
        let a_k = self.action_to_kernel_coords(a)?;
        let sigma_a = self.bandwidths.sigma_a();
        let mut j = 0.0;
        for (i, w) in weights.omega.iter().enumerate() {
            j += w * rbf_unchecked(self.a_kern.row(i), &a_k, sigma_a);
        }
        Ok(j)
    }

    /// Analytic gradient `∇_a Ĵ = (1/σ_a²) Σ_i ω_i k_a(a_i, a) (a_i − a)`,
    /// expressed in original action units.
    pub fn gradient(&self, weights: &ContextWeights, a: &[f64]) -> Result<Vec<f64>> {
        let a_k = self.action_to_kernel_coords(a)?;
        let sigma_a = self.bandwidths.sigma_a();
        let inv_s2 = 1.0 / (sigma_a * sigma_a);
        let mut grad = vec![0.0; a.len()];
        for (i, w) in weights.omega.iter().enumerate() {
            let coef = w * rbf_unchecked(self.a_kern.row(i), &a_k, sigma_a) * inv_s2;
            for (g, (ai, aj)) in grad.iter_mut().zip(self.a_kern.row(i).iter().zip(a_k.iter())) {
                *g += coef * (ai - aj);
            }
        }
        // Chain rule back through the per-column standardization.
        if let Some(s) = &self.standardizer {
            for (g, sd) in grad.iter_mut().zip(s.a.std.iter()) {
                *g /= sd;
            }
        }
        Ok(grad)
    }

    fn action_to_kernel_coords(&self, a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.action_dim() {
            return Err(Error::DimensionMismatch {
                what: "action vector",
                expected: self.action_dim(),
                got: a.len(),
            });
        }
        Ok(match &self.standardizer {
            Some(s) => s.a.transform_vec(a),
            None => a.to_vec(),
        })
    }

    /// Rebuild an estimator from its frozen parts (deserialization path).
    /// The stage-2 factorization and `K_uu` are recomputed deterministically,
    /// so a round trip reproduces objective values exactly.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: EstimatorKind,
        x_raw: Mat,
        u_raw: Mat,
        a_raw: Mat,
        standardizer: Option<Standardizer>,
        bandwidths: Bandwidths,
        lambda_h: f64,
        lambda_x: f64,
        eta: f64,
        alpha: Vec<f64>,
        config: EstimatorConfig,
    ) -> Result<Self> {
        let n = x_raw.n_rows();
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        if u_raw.n_rows() != n || a_raw.n_rows() != n || alpha.len() != n {
            return Err(Error::DimensionMismatch {
                what: "estimator parts row counts",
                expected: n,
                got: if u_raw.n_rows() != n {
                    u_raw.n_rows()
                } else if a_raw.n_rows() != n {
                    a_raw.n_rows()
                } else {
                    alpha.len()
                },
            });
        }
        if kind == EstimatorKind::Conditional && u_raw.n_cols() > 0 {
            return Err(Error::Schema(
                "conditional estimator cannot carry a pre-alteration block".into(),
            ));
        }
        let (x_kern, u_kern, a_kern) = match &standardizer {
            Some(s) => (
                s.x.transform_mat(&x_raw),
                s.u.transform_mat(&u_raw),
                s.a.transform_mat(&a_raw),
            ),
            None => (x_raw.clone(), u_raw.clone(), a_raw.clone()),
        };
        let (stage2, k_uu) = match kind {
            EstimatorKind::Nested => {
                let k_xx = GramMatrix::from_samples(&x_kern, bandwidths.sigma_x())?;
                let stage2 = RidgeFactor::new(&k_xx, lambda_x, n)?;
                let k_uu = if u_kern.n_cols() > 0 {
                    Some(GramMatrix::from_samples(&u_kern, bandwidths.sigma_u()?)?)
                } else {
                    None
                };
                (Some(stage2), k_uu)
            }
            EstimatorKind::Conditional => (None, None),
        };
        Ok(FittedNestedEstimator {
            kind,
            x_raw,
            u_raw,
            a_raw,
            x_kern,
            a_kern,
            standardizer,
            bandwidths,
            lambda_h,
            lambda_x,
            eta,
            alpha,
            stage2,
            k_uu,
            config,
        })
    }
}
