//! Ground-truth structural generators for the synthetic evaluation settings.
//!
//! Each benchmark is a small structural system sampled in topological order.
//! Three sampling modes share the same equations:
//!
//! * observational — every variable follows its own equation;
//! * context-only — just the context roots;
//! * rehearsal — the context is pinned to an observed value and, for
//!   alterational draws, the actionable variables are forced to a chosen
//!   value, severing their own equations. Everything downstream then flows
//!   through the equations unchanged.
//!
//! Every noise draw comes from a substream keyed by (seed, purpose, row,
//! variable), so forcing an action cannot perturb the draws of any other
//! variable, and generation is reproducible regardless of evaluation order.
//!
//! Normal noise terms `N(m, s)` read `s` as the standard deviation by
//! default; the variance reading is available as an alternative convention.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{ObservationalDataset, Role, VariableSchema};
use crate::linalg::Mat;
use crate::optimizer::ActionBox;
use crate::region::PolytopeRegion;
use crate::rng::Rng;
use crate::{Error, Result};

/// Substream purpose tags.
const PURPOSE_OBSERVATIONAL: u64 = 0;
const PURPOSE_CONTEXT: u64 = 1;
const PURPOSE_REHEARSAL: u64 = 2;

/// How the scale parameter of a normal noise term is interpreted.
///
/// The standard-deviation reading is the default: it lands the no-action
/// success rates close to the reference levels for these settings (0.066 vs
/// 0.064 on the first nonlinear setting, 0.567 vs 0.598 on the bank setting),
/// whereas the variance reading is far off on the bank setting and caps the
/// achievable post-alteration success on the linear setting below its
/// reference level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseConvention {
    /// `N(m, s)` has variance `s`.
    Variance,
    /// `N(m, s)` has standard deviation `s` (default).
    #[default]
    StdDev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkId {
    LinSyn1,
    NonSyn1,
    NonSyn2,
    BankExp,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 4] = [
        BenchmarkId::LinSyn1,
        BenchmarkId::NonSyn1,
        BenchmarkId::NonSyn2,
        BenchmarkId::BankExp,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkId::LinSyn1 => "lin-syn1",
            BenchmarkId::NonSyn1 => "non-syn1",
            BenchmarkId::NonSyn2 => "non-syn2",
            BenchmarkId::BankExp => "bank-exp",
        }
    }

    /// Accepts both `-` and `_` separators.
    pub fn parse(s: &str) -> Result<Self> {
        let norm: alloc::string::String =
            s.chars().map(|c| if c == '_' { '-' } else { c }).collect();
        match norm.as_str() {
            "lin-syn1" => Ok(BenchmarkId::LinSyn1),
            "non-syn1" => Ok(BenchmarkId::NonSyn1),
            "non-syn2" => Ok(BenchmarkId::NonSyn2),
            "bank-exp" => Ok(BenchmarkId::BankExp),
            _ => Err(Error::UnknownBenchmark(s.to_string())),
        }
    }
}

/// A benchmark's structural system plus its desired region and action box.
#[derive(Debug, Clone)]
pub struct BenchmarkOracle {
    id: BenchmarkId,
    noise: NoiseConvention,
    schema: VariableSchema,
    region: PolytopeRegion,
    action_box: ActionBox,
}

impl BenchmarkOracle {
    pub fn new(id: BenchmarkId) -> Self {
        Self::with_noise(id, NoiseConvention::default())
    }

    pub fn with_noise(id: BenchmarkId, noise: NoiseConvention) -> Self {
        let (schema, region, action_box) = match id {
            BenchmarkId::LinSyn1 => (
                VariableSchema::new(vec![
                    ("X1".to_string(), Role::Context),
                    ("X2".to_string(), Role::Context),
                    ("U2".to_string(), Role::Pre),
                    ("A1".to_string(), Role::Actionable),
                    ("U1".to_string(), Role::Post),
                    ("A2".to_string(), Role::Actionable),
                    ("Y1".to_string(), Role::Outcome),
                    ("Y2".to_string(), Role::Outcome),
                ])
                .expect("static schema"),
                PolytopeRegion::from_intervals(
                    2,
                    &[(0, Some(0.0), Some(2.0)), (1, Some(0.0), Some(2.0))],
                )
                .expect("static region"),
                ActionBox::new(vec![-3.0, -3.0], vec![3.0, 3.0]).expect("static box"),
            ),
            BenchmarkId::NonSyn1 => (
                VariableSchema::new(vec![
                    ("X".to_string(), Role::Context),
                    ("U".to_string(), Role::Pre),
                    ("A1".to_string(), Role::Actionable),
                    ("A2".to_string(), Role::Actionable),
                    ("Y".to_string(), Role::Outcome),
                ])
                .expect("static schema"),
                PolytopeRegion::from_intervals(1, &[(0, Some(1.5), Some(2.0))])
                    .expect("static region"),
                ActionBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).expect("static box"),
            ),
            BenchmarkId::NonSyn2 => (
                VariableSchema::new(vec![
                    ("X1".to_string(), Role::Context),
                    ("X2".to_string(), Role::Context),
                    ("A1".to_string(), Role::Actionable),
                    ("U1".to_string(), Role::Post),
                    ("U2".to_string(), Role::Post),
                    ("A2".to_string(), Role::Actionable),
                    ("Y1".to_string(), Role::Outcome),
                ])
                .expect("static schema"),
                PolytopeRegion::from_intervals(1, &[(0, Some(0.9), Some(1.5))])
                    .expect("static region"),
                ActionBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).expect("static box"),
            ),
            BenchmarkId::BankExp => (
                VariableSchema::new(vec![
                    ("X1".to_string(), Role::Context),
                    ("X2".to_string(), Role::Context),
                    ("U1".to_string(), Role::Pre),
                    ("A2".to_string(), Role::Actionable),
                    ("Y1".to_string(), Role::Outcome),
                    ("Y2".to_string(), Role::Outcome),
                ])
                .expect("static schema"),
                PolytopeRegion::from_intervals(2, &[(0, Some(0.6), None), (1, Some(0.3), None)])
                    .expect("static region"),
                ActionBox::new(vec![0.0], vec![1.0]).expect("static box"),
            ),
        };
        BenchmarkOracle {
            id,
            noise,
            schema,
            region,
            action_box,
        }
    }

    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    pub fn noise_convention(&self) -> NoiseConvention {
        self.noise
    }

    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub fn region(&self) -> &PolytopeRegion {
        &self.region
    }

    pub fn action_box(&self) -> &ActionBox {
        &self.action_box
    }

    pub fn context_dim(&self) -> usize {
        self.schema.dim_of(Role::Context)
    }

    pub fn action_dim(&self) -> usize {
        self.schema.dim_of(Role::Actionable)
    }

    pub fn outcome_dim(&self) -> usize {
        self.schema.dim_of(Role::Outcome)
    }

    /// Sample `n` observational rows in topological order; every variable
    /// follows its own equation. Deterministic per seed.
    pub fn generate_observational(&self, n: usize, seed: u64) -> Result<ObservationalDataset> {
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        let mut data = Vec::with_capacity(n * self.schema.len());
        for row in 0..n {
            let draw = Draw {
                seed,
                purpose: PURPOSE_OBSERVATIONAL,
                row: row as u64,
                noise: self.noise,
                context: None,
                action: None,
            };
            data.extend_from_slice(&self.sample_row(&draw));
        }
        let rows = Mat::from_vec(n, self.schema.len(), data);
        ObservationalDataset::new(self.schema.clone(), rows)
    }

    /// Draw one fresh context (the context-root equations only).
    pub fn sample_context(&self, seed: u64) -> Vec<f64> {
        let draw = Draw {
            seed,
            purpose: PURPOSE_CONTEXT,
            row: 0,
            noise: self.noise,
            context: None,
            action: None,
        };
        match self.id {
            BenchmarkId::LinSyn1 => vec![
                draw.normal(0, 0.0, 0.1),
                draw.normal(1, 0.0, 0.1),
            ],
            BenchmarkId::NonSyn1 => vec![draw.uniform(0, -1.0, 1.0)],
            BenchmarkId::NonSyn2 | BenchmarkId::BankExp => {
                vec![draw.uniform(0, 0.0, 1.0), draw.uniform(1, 0.0, 1.0)]
            }
        }
    }

    /// Post-alteration outcome draws: pre-alteration variables follow their
    /// equations given the context, the actionable variables are forced to
    /// `a`, and everything downstream flows through the equations.
    pub fn sample_alterational(&self, x: &[f64], a: &[f64], m: usize, seed: u64) -> Result<Mat> {
        if a.len() != self.action_dim() {
            return Err(Error::DimensionMismatch {
                what: "forced action",
                expected: self.action_dim(),
                got: a.len(),
            });
        }
        if let Some((index, value, lo, hi)) = self.action_box.violation(a) {
            return Err(Error::ActionOutsideBox {
                index,
                value,
                lo,
                hi,
            });
        }
        let rows = self.rehearse_rows(x, Some(a), m, seed)?;
        Ok(rows.select_columns(&self.schema.indices_of(Role::Outcome)))
    }

    /// Outcome draws with no alteration: the actionable variables follow
    /// their own equations given the context.
    pub fn sample_baseline(&self, x: &[f64], m: usize, seed: u64) -> Result<Mat> {
        let rows = self.rehearse_rows(x, None, m, seed)?;
        Ok(rows.select_columns(&self.schema.indices_of(Role::Outcome)))
    }

    /// Full variable rows under the rehearsal stream (diagnostics and tests).
    /// `action = None` leaves the actionable equations intact.
    pub fn rehearse_rows(&self, x: &[f64], action: Option<&[f64]>, m: usize, seed: u64) -> Result<Mat> {
        if x.len() != self.context_dim() {
            return Err(Error::DimensionMismatch {
                what: "context vector",
                expected: self.context_dim(),
                got: x.len(),
            });
        }
        let mut data = Vec::with_capacity(m * self.schema.len());
        for row in 0..m {
            let draw = Draw {
                seed,
                purpose: PURPOSE_REHEARSAL,
                row: row as u64,
                noise: self.noise,
                context: Some(x),
                action,
            };
            data.extend_from_slice(&self.sample_row(&draw));
        }
        Ok(Mat::from_vec(m, self.schema.len(), data))
    }

    /// One full row through the structural equations, in schema column order.
    /// Coefficients appear exactly as the generation mechanisms list them.
    #[allow(clippy::neg_multiply)]
    fn sample_row(&self, d: &Draw) -> Vec<f64> {
        match self.id {
            BenchmarkId::LinSyn1 => {
                let x1 = d.ctx(0).unwrap_or_else(|| d.normal(0, 0.0, 0.1));
                let x2 = d.ctx(1).unwrap_or_else(|| d.normal(1, 0.0, 0.1));
                let u2 = d.normal(2, 10.0 * x2, 0.1);
                let a1 = d.act(0).unwrap_or_else(|| d.normal(3, 10.0 * x1, 0.1));
                let u1 = d.normal(4, 0.5 * a1 + 1.3 * u2, 0.1);
                let a2 = d
                    .act(1)
                    .unwrap_or_else(|| d.normal(5, 2.0 * a1 + 0.4 * u2, 0.1));
                let y1 = d.normal(6, -1.0 * a1 + 0.9 * a2, 0.1);
                let y2 = d.normal(7, 1.6 * a1 - 0.9 * a2, 0.1);
                vec![x1, x2, u2, a1, u1, a2, y1, y2]
            }
            BenchmarkId::NonSyn1 => {
                let x = d.ctx(0).unwrap_or_else(|| d.uniform(0, -1.0, 1.0));
                let u = d.exponential(1);
                let a1 = d
                    .act(0)
                    .unwrap_or_else(|| d.normal(2, 0.8 * x + 0.2 * u, 0.5));
                let a2 = d
                    .act(1)
                    .unwrap_or_else(|| d.normal(3, 0.5 * libm::sin(u), 0.5));
                let ln_u1 = libm::log(u + 1.0);
                let mean_y = 1.5 - (a1 - x) * (a1 - x) - (a2 - ln_u1) * (a2 - ln_u1)
                    + 0.2 * libm::sin(a1 * a2);
                let y = d.normal(4, mean_y, 0.1);
                vec![x, u, a1, a2, y]
            }
            BenchmarkId::NonSyn2 => {
                let x1 = d.ctx(0).unwrap_or_else(|| d.uniform(0, 0.0, 1.0));
                let x2 = d.ctx(1).unwrap_or_else(|| d.uniform(1, 0.0, 1.0));
                let a1 = d.act(0).unwrap_or_else(|| {
                    d.normal(
                        2,
                        1.0 * x1 - 1.0 * x2 + 0.2 * x1 * x1 - 0.2 * x2 * x2 + 0.1 * x1 * x2,
                        0.1,
                    )
                });
                let u1 = d.normal(
                    3,
                    -1.0 * x1 + 2.0 * x2 + 3.0 * a1 - 0.2 * x1 * x1 + 0.4 * x2 * x2
                        + 0.6 * a1 * a1
                        + 0.1 * (x1 * x2 + x1 * a1 + x2 * a1),
                    0.1,
                );
                let u2 = d.normal(
                    4,
                    -1.0 * x1 + 4.0 * u1 - 0.2 * x1 * x1 + 0.8 * u1 * u1 + 0.1 * x1 * u1,
                    0.1,
                );
                let a2 = d.act(1).unwrap_or_else(|| {
                    d.normal(
                        5,
                        -1.0 * x1 - 0.5 * x2 + 0.3 * u1 - 0.2 * x1 * x1 - 0.1 * x2 * x2
                            + 0.06 * u1 * u1
                            + 0.1 * (x1 * x2 + x1 * u1 + x2 * u1),
                        0.1,
                    )
                });
                // Pairwise interactions over the parents of Y1: {X1, U1, U2, A2}.
                let pairs =
                    x1 * u1 + x1 * u2 + x1 * a2 + u1 * u2 + u1 * a2 + u2 * a2;
                let mean_y = 0.5
                    + (0.2 * (x1 + x1 * x1) - 5.0 * (u1 + u1 * u1) - 1.0 * (u2 + u2 * u2)
                        + 5.0 * (a2 + a2 * a2))
                        / 60.0
                    + 0.5 * pairs;
                let y1 = d.normal(6, mean_y, 0.1);
                vec![x1, x2, a1, u1, u2, a2, y1]
            }
            BenchmarkId::BankExp => {
                let x1 = d.ctx(0).unwrap_or_else(|| d.uniform(0, 0.0, 1.0));
                let x2 = d.ctx(1).unwrap_or_else(|| d.uniform(1, 0.0, 1.0));
                let u1 = d.beta_2_2(2);
                let a2 = d
                    .act(0)
                    .unwrap_or_else(|| d.normal(3, u1 + 0.5 * x1 + 0.5 * x2 - 0.5, 0.2));
                let y1 = d.normal(
                    4,
                    sigmoid(2.0 * libm::pow(u1, 1.1) - 1.5 * a2 + 0.2 * x2 + 0.4),
                    0.05,
                );
                let y2 = d.normal(5, 0.8 * a2 + 0.5 * u1, 0.05);
                vec![x1, x2, u1, a2, y1, y2]
            }
        }
    }
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-t))
}

/// Addressing for one row's noise draws, plus any pinned context/action.
struct Draw<'a> {
    seed: u64,
    purpose: u64,
    row: u64,
    noise: NoiseConvention,
    context: Option<&'a [f64]>,
    action: Option<&'a [f64]>,
}

impl Draw<'_> {
    #[inline]
    fn ctx(&self, i: usize) -> Option<f64> {
        self.context.map(|x| x[i])
    }

    #[inline]
    fn act(&self, i: usize) -> Option<f64> {
        self.action.map(|a| a[i])
    }

    #[inline]
    fn stream(&self, var: u64) -> Rng {
        Rng::substream(self.seed, &[self.purpose, self.row, var])
    }

    fn normal(&self, var: u64, mean: f64, scale: f64) -> f64 {
        let std = match self.noise {
            NoiseConvention::Variance => libm::sqrt(scale),
            NoiseConvention::StdDev => scale,
        };
        mean + std * self.stream(var).standard_normal()
    }

    fn uniform(&self, var: u64, lo: f64, hi: f64) -> f64 {
        self.stream(var).uniform_in(lo, hi)
    }

    fn exponential(&self, var: u64) -> f64 {
        self.stream(var).exponential()
    }

    fn beta_2_2(&self, var: u64) -> f64 {
        self.stream(var).beta_2_2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Role;

    #[test]
    fn id_parsing_accepts_both_separators() {
        assert_eq!(BenchmarkId::parse("lin-syn1").unwrap(), BenchmarkId::LinSyn1);
        assert_eq!(BenchmarkId::parse("bank_exp").unwrap(), BenchmarkId::BankExp);
        assert!(matches!(
            BenchmarkId::parse("bogus"),
            Err(Error::UnknownBenchmark(_))
        ));
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let oracle = BenchmarkOracle::new(BenchmarkId::NonSyn1);
        let a = oracle.generate_observational(64, 5).unwrap();
        let b = oracle.generate_observational(64, 5).unwrap();
        assert_eq!(a, b);
        let c = oracle.generate_observational(64, 6).unwrap();
        assert_ne!(a, c);

        let x = oracle.sample_context(9);
        assert_eq!(x, oracle.sample_context(9));
    }

    #[test]
    fn contexts_live_on_their_supports() {
        let non1 = BenchmarkOracle::new(BenchmarkId::NonSyn1);
        for s in 0..50 {
            let x = non1.sample_context(s);
            assert_eq!(x.len(), 1);
            assert!((-1.0..=1.0).contains(&x[0]));
        }
        let bank = BenchmarkOracle::new(BenchmarkId::BankExp);
        for s in 0..50 {
            let x = bank.sample_context(s);
            assert_eq!(x.len(), 2);
            assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn lin_syn1_observational_moments() {
        // E[A1] = 10 E[X1] = 0; Var(A1) = 100·0.01 + 0.01 = 1.01.
        let oracle = BenchmarkOracle::new(BenchmarkId::LinSyn1);
        let n = 100_000;
        let ds = oracle.generate_observational(n, 0).unwrap();
        let a1_col = oracle.schema().indices_of(Role::Actionable)[0];
        let mean =
            (0..n).map(|i| ds.rows().get(i, a1_col)).sum::<f64>() / n as f64;
        let se = libm::sqrt(1.01 / n as f64);
        assert!(mean.abs() <= 3.0 * se, "mean {mean}, 3se {}", 3.0 * se);
    }

    #[test]
    fn bank_exp_u1_beta_support_and_mean() {
        let oracle = BenchmarkOracle::new(BenchmarkId::BankExp);
        let n = 100_000;
        let ds = oracle.generate_observational(n, 1).unwrap();
        let u_col = oracle.schema().indices_of(Role::Pre)[0];
        let mut sum = 0.0;
        for i in 0..n {
            let v = ds.rows().get(i, u_col);
            assert!((0.0..=1.0).contains(&v));
            sum += v;
        }
        let mean = sum / n as f64;
        // Beta(2,2): mean 1/2, variance 1/20.
        let se = libm::sqrt(0.05 / n as f64);
        assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean}");
    }

    #[test]
    fn bank_exp_alterational_outcome_mean() {
        // Y2 = 0.8·a + 0.5·U1 + noise with E[U1] = 1/2: at a = 0.5, E[Y2] = 0.65.
        let oracle = BenchmarkOracle::new(BenchmarkId::BankExp);
        let m = 100_000;
        let ys = oracle
            .sample_alterational(&[0.3, 0.7], &[0.5], m, 11)
            .unwrap();
        let mean = (0..m).map(|i| ys.get(i, 1)).sum::<f64>() / m as f64;
        // Var(Y2) = 0.25·(1/20) + 0.05² = 0.015.
        let se = libm::sqrt(0.015 / m as f64);
        assert!((mean - 0.65).abs() <= 3.0 * se, "mean {mean}");
    }

    #[test]
    fn lin_syn1_alterational_outcome_mean() {
        // Y1 depends only on the forced actions: E[Y1] = −a1 + 0.9·a2.
        let oracle = BenchmarkOracle::new(BenchmarkId::LinSyn1);
        let m = 100_000;
        let (a1, a2) = (1.5, -0.5);
        let ys = oracle
            .sample_alterational(&[0.1, -0.2], &[a1, a2], m, 3)
            .unwrap();
        let mean = (0..m).map(|i| ys.get(i, 0)).sum::<f64>() / m as f64;
        let expect = -a1 + 0.9 * a2;
        let se = libm::sqrt(0.01 / m as f64);
        assert!((mean - expect).abs() <= 3.0 * se, "mean {mean} vs {expect}");
    }

    #[test]
    fn alteration_does_not_touch_pre_alteration_draws() {
        let oracle = BenchmarkOracle::new(BenchmarkId::BankExp);
        let x = [0.4, 0.6];
        let u_col = oracle.schema().indices_of(Role::Pre)[0];
        let rows_a = oracle.rehearse_rows(&x, Some(&[0.1]), 200, 7).unwrap();
        let rows_b = oracle.rehearse_rows(&x, Some(&[0.9]), 200, 7).unwrap();
        for i in 0..200 {
            assert_eq!(rows_a.get(i, u_col), rows_b.get(i, u_col));
        }
    }

    #[test]
    fn alterational_rejects_out_of_box_actions() {
        let oracle = BenchmarkOracle::new(BenchmarkId::BankExp);
        let err = oracle
            .sample_alterational(&[0.4, 0.6], &[1.5], 10, 0)
            .unwrap_err();
        assert!(matches!(err, Error::ActionOutsideBox { .. }));
    }

    #[test]
    fn regions_and_boxes_match_the_listed_settings() {
        let lin = BenchmarkOracle::new(BenchmarkId::LinSyn1);
        assert!(lin.region().contains(&[1.0, 1.0]).unwrap());
        assert!(!lin.region().contains(&[-0.1, 1.0]).unwrap());
        assert!(!lin.region().contains(&[1.0, 2.1]).unwrap());
        assert_eq!(lin.action_box().lo(), &[-3.0, -3.0]);

        let non1 = BenchmarkOracle::new(BenchmarkId::NonSyn1);
        assert!(non1.region().contains(&[1.7]).unwrap());
        assert!(!non1.region().contains(&[1.4]).unwrap());

        let non2 = BenchmarkOracle::new(BenchmarkId::NonSyn2);
        assert!(non2.region().contains(&[1.0]).unwrap());
        assert!(!non2.region().contains(&[1.6]).unwrap());

        let bank = BenchmarkOracle::new(BenchmarkId::BankExp);
        assert!(bank.region().contains(&[0.7, 0.5]).unwrap());
        assert!(!bank.region().contains(&[0.5, 0.5]).unwrap());
        assert!(!bank.region().contains(&[0.7, 0.2]).unwrap());
        assert_eq!(bank.action_box().lo(), &[0.0]);
        assert_eq!(bank.action_box().hi(), &[1.0]);
    }

    #[test]
    fn noise_convention_changes_scale() {
        let var = BenchmarkOracle::with_noise(BenchmarkId::LinSyn1, NoiseConvention::Variance);
        let std = BenchmarkOracle::new(BenchmarkId::LinSyn1);
        let n = 20_000;
        let dv = var.generate_observational(n, 0).unwrap();
        let dsd = std.generate_observational(n, 0).unwrap();
        let spread = |ds: &ObservationalDataset| {
            let mut s = 0.0;
            for i in 0..n {
                let v = ds.rows().get(i, 0);
                s += v * v;
            }
            s / n as f64
        };
        // X1 variance: 0.1 under the variance reading, 0.01 under std-dev.
        assert!((spread(&dv) - 0.1).abs() < 0.01);
        assert!((spread(&dsd) - 0.01).abs() < 0.001);
    }
}
