//! Decision optimization for the *avoiding undesired future* (AUF) problem.
//!
//! Given purely observational records of contexts, intermediate covariates,
//! actions and outcomes, this crate fits a nested kernel-ridge estimator of
//! the probability that outcomes land in a desired region after a feasible
//! alteration of the actionable variables, and searches the feasible action
//! box for the alteration maximizing that probability.
//!
//! The pipeline, in the order the modules stack up:
//!
//! * [`region`] — the desired outcome polytope and its Probit-smoothed
//!   desirability surrogate.
//! * [`kernels`] — RBF kernels, Gram matrices, median-heuristic bandwidths
//!   and regularized SPD solves.
//! * [`dataset`] — role-tagged observational data (context / pre-alteration /
//!   actionable / post-alteration / outcome columns).
//! * [`estimator`] — the two-stage kernel-ridge estimator of the smoothed
//!   objective and its analytic action gradient.
//! * [`optimizer`] — multi-start projected gradient ascent over the action box.
//! * [`benchmarks`] — ground-truth structural generators for the synthetic
//!   evaluation settings.
//! * [`evaluator`] — Monte Carlo scoring, episode orchestration and the
//!   empirical surrogate-gap / consistency checks.
//!
//! The crate is `no_std` (alloc required); all floating-point transcendentals
//! go through `libm`. Every sampler and solver is a pure function of its
//! inputs and seed, so identical calls reproduce bit-identical results.

#![no_std]
#![forbid(unsafe_code)]
// Index-based loops are the clearer idiom for the dense-matrix kernels here.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod benchmarks;
pub mod dataset;
pub mod estimator;
pub mod evaluator;
pub mod kernels;
pub mod linalg;
pub mod math;
pub mod optimizer;
pub mod region;
pub mod rng;

mod error;

pub use error::{Error, Result};
