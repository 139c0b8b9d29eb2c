//! The desired outcome region S and its smoothed desirability surrogate.
//!
//! S is a convex polytope given by linear constraints `m_kᵀ y <= b_k`. The
//! hard membership indicator is discontinuous, so optimization and kernel
//! estimation run on the Probit surrogate `w_η(y) = Π_k Φ(η (b_k - m_kᵀ y))`,
//! which is smooth, lies strictly inside (0, 1) and sharpens to the indicator
//! as η grows.

use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::math::{norm2, normal_cdf, normal_pdf};
use crate::{Error, Result};

/// One half-space constraint `normal · y <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub bound: f64,
}

/// Convex polytope of acceptable outcomes. Membership is boundary-inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeRegion {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl PolytopeRegion {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Schema("region needs at least one constraint".into()));
        }
        for c in &constraints {
            if c.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "region constraint normal",
                    expected: dim,
                    got: c.normal.len(),
                });
            }
            let norm = norm2(&c.normal);
            if norm <= 0.0 || !norm.is_finite() || !c.bound.is_finite() {
                return Err(Error::Schema(
                    "region constraint must have a finite nonzero normal and finite bound".into(),
                ));
            }
        }
        Ok(PolytopeRegion { dim, constraints })
    }

    /// Axis-aligned interval `lo_j <= y_j <= hi_j` on the listed coordinates.
    /// Pass `None` to leave a side unbounded.
    pub fn from_intervals(dim: usize, intervals: &[(usize, Option<f64>, Option<f64>)]) -> Result<Self> {
        let mut constraints = Vec::new();
        for &(j, lo, hi) in intervals {
            if let Some(hi) = hi {
                let mut m = alloc::vec![0.0; dim];
                m[j] = 1.0;
                constraints.push(Constraint { normal: m, bound: hi });
            }
            if let Some(lo) = lo {
                let mut m = alloc::vec![0.0; dim];
                m[j] = -1.0;
                constraints.push(Constraint { normal: m, bound: -lo });
            }
        }
        PolytopeRegion::new(dim, constraints)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Hard membership indicator; `y` is in S iff every constraint holds
    /// with `<=`.
    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        self.check_dim(y)?;
        Ok(self
            .constraints
            .iter()
            .all(|c| dot(&c.normal, y) <= c.bound))
    }

    /// The indicator as 0/1, matching the Monte Carlo scoring convention.
    pub fn indicator(&self, y: &[f64]) -> Result<u8> {
        Ok(self.contains(y)? as u8)
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "outcome vector",
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Probit-smoothed desirability `w_η`, used wherever a differentiable stand-in
/// for the region indicator is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedDesirability {
    region: PolytopeRegion,
    eta: f64,
}

impl SmoothedDesirability {
    pub fn new(region: PolytopeRegion, eta: f64) -> Result<Self> {
        if eta <= 0.0 || !eta.is_finite() {
            return Err(Error::NonPositive {
                what: "eta",
                value: eta,
            });
        }
        Ok(SmoothedDesirability { region, eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn region(&self) -> &PolytopeRegion {
        &self.region
    }

    /// `w_η(y) = Π_k Φ(η (b_k - m_kᵀ y))`, strictly inside (0, 1) for finite y.
    pub fn value(&self, y: &[f64]) -> Result<f64> {
        self.region.check_dim(y)?;
        let mut w = 1.0;
        for c in &self.region.constraints {
            w *= normal_cdf(self.eta * (c.bound - dot(&c.normal, y)));
        }
        Ok(w)
    }

    /// Element-wise `w_η` over the rows of an outcome matrix, order preserved.
    pub fn values(&self, outcomes: &Mat) -> Result<Vec<f64>> {
        if outcomes.n_cols() != self.region.dim {
            return Err(Error::DimensionMismatch {
                what: "outcome matrix columns",
                expected: self.region.dim,
                got: outcomes.n_cols(),
            });
        }
        (0..outcomes.n_rows())
            .map(|i| self.value(outcomes.row(i)))
            .collect()
    }

    /// Gradient of `w_η` with respect to `y`.
    ///
    /// Computed by the product rule as a sum over constraints, avoiding the
    /// φ/Φ ratio that underflows far outside the region.
    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.region.check_dim(y)?;
        let cs = &self.region.constraints;
        let phis: Vec<f64> = cs
            .iter()
            .map(|c| normal_cdf(self.eta * (c.bound - dot(&c.normal, y))))
            .collect();
        let mut grad = alloc::vec![0.0; self.region.dim];
        for (k, c) in cs.iter().enumerate() {
            let mut rest = 1.0;
            for (j, &p) in phis.iter().enumerate() {
                if j != k {
                    rest *= p;
                }
            }
            let density = normal_pdf(self.eta * (c.bound - dot(&c.normal, y)));
            let coef = -self.eta * density * rest;
            for (g, m) in grad.iter_mut().zip(c.normal.iter()) {
                *g += coef * m;
            }
        }
        Ok(grad)
    }
}

/// Smoothing scales the adaptive rule chooses from.
pub const ETA_CANDIDATES: [f64; 3] = [5.0, 10.0, 20.0];

/// Fraction of positive samples below which the softest scale is used.
pub const ETA_LOW_THRESHOLD: f64 = 0.10;
/// Fraction of positive samples at or above which the sharpest scale is used.
pub const ETA_HIGH_THRESHOLD: f64 = 0.30;

/// Pick the smoothing scale from the fraction of in-region training outcomes:
/// sharper approximation when positive samples are abundant.
pub fn select_eta(positive_fraction: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&positive_fraction) || !positive_fraction.is_finite() {
        return Err(Error::OutOfRange {
            what: "positive_fraction",
            range: "[0, 1]",
            value: positive_fraction,
        });
    }
    Ok(if positive_fraction < ETA_LOW_THRESHOLD {
        ETA_CANDIDATES[0]
    } else if positive_fraction < ETA_HIGH_THRESHOLD {
        ETA_CANDIDATES[1]
    } else {
        ETA_CANDIDATES[2]
    })
}
