//! Scalar math shared across the crate: the standard normal distribution and
//! an adaptive quadrature routine.

use crate::{Error, Result};

pub const SQRT_2: f64 = core::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.3989422804014327;

/// Standard normal CDF via the complementary error function.
#[inline]
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t / SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(t: f64) -> f64 {
    INV_SQRT_2PI * libm::exp(-0.5 * t * t)
}

/// Squared Euclidean distance between two equal-length slices.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        let d = x - y;
        s += d * d;
    }
    s
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(sq_dist(a, b))
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|&x| x * x).sum())
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// The first few subdivision levels are unconditional so a narrow feature in
/// the middle of the interval cannot slip between the initial sample points.
/// Recursion depth is capped; exceeding it reports [`Error::QuadratureFailed`]
/// instead of returning a silently inaccurate value.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60, 5)
}

/// Adaptive Simpson over a partition: integrates each `[points[i], points[i+1]]`
/// piece and sums. Placing known feature boundaries (region edges, kinks) at
/// partition points keeps the adaptive refinement honest.
pub fn adaptive_simpson_pieces<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: f64) -> Result<f64> {
    let pieces = points.len().saturating_sub(1).max(1);
    let piece_tol = tol / pieces as f64;
    let mut total = 0.0;
    for pair in points.windows(2) {
        total += adaptive_simpson(f, pair[0], pair[1], piece_tol)?;
    }
    Ok(total)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    force: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if force == 0 && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailed);
    }
    let half_tol = 0.5 * tol;
    let next_force = force.saturating_sub(1);
    Ok(
        simpson_step(f, a, m, fa, flm, fm, left, half_tol, depth - 1, next_force)?
            + simpson_step(f, m, b, fm, frm, fb, right, half_tol, depth - 1, next_force)?,
    )
}
