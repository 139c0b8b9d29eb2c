//! RBF kernel evaluation, Gram matrices, bandwidth selection and regularized
//! SPD solves — the shared math layer under both estimator stages.

use alloc::vec::Vec;

use crate::linalg::{Cholesky, Mat};
use crate::math::{euclidean, sq_dist};
use crate::{Error, Result};

/// Per-block RBF bandwidths for the joint kernel over (x, u, a).
///
/// The joint kernel is the product of the per-block RBF kernels, so the
/// "joint bandwidth" is exactly this triple. `sigma_u` is absent when the
/// dataset has no pre-alteration block; asking for it is then an error rather
/// than a silent default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidths {
    sigma_x: f64,
    sigma_u: Option<f64>,
    sigma_a: f64,
}

impl Bandwidths {
    pub fn new(sigma_x: f64, sigma_u: Option<f64>, sigma_a: f64) -> Result<Self> {
        check_sigma(sigma_x, "sigma_x")?;
        if let Some(s) = sigma_u {
            check_sigma(s, "sigma_u")?;
        }
        check_sigma(sigma_a, "sigma_a")?;
        Ok(Bandwidths {
            sigma_x,
            sigma_u,
            sigma_a,
        })
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_a(&self) -> f64 {
        self.sigma_a
    }

    pub fn sigma_u(&self) -> Result<f64> {
        self.sigma_u.ok_or(Error::UncoveredBlock { block: "u" })
    }

    pub fn covers_u(&self) -> bool {
        self.sigma_u.is_some()
    }
}

fn check_sigma(sigma: f64, what: &'static str) -> Result<()> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::NonPositive { what, value: sigma });
    }
    Ok(())
}

/// RBF kernel `exp(-||v - v'||² / (2σ²))`. Equals 1 iff `v == v'`.
pub fn rbf_kernel(v: &[f64], v_prime: &[f64], sigma: f64) -> Result<f64> {
    if v.len() != v_prime.len() {
        return Err(Error::DimensionMismatch {
            what: "rbf_kernel vectors",
            expected: v.len(),
            got: v_prime.len(),
        });
    }
    check_sigma(sigma, "sigma")?;
    Ok(rbf_unchecked(v, v_prime, sigma))
}

#[inline]
pub(crate) fn rbf_unchecked(v: &[f64], v_prime: &[f64], sigma: f64) -> f64 {
    libm::exp(-sq_dist(v, v_prime) / (2.0 * sigma * sigma))
}

/// Joint kernel over h = (x, u, a): the product of the per-block RBF factors.
///
/// Empty u blocks contribute a factor of 1 (and need no `sigma_u`). The result
/// is computed literally as the product of the three block kernels, so the
/// multiplicative decomposition holds by construction.
pub fn product_kernel_h(
    x_i: &[f64],
    u_i: &[f64],
    a_i: &[f64],
    x: &[f64],
    u: &[f64],
    a: &[f64],
    bw: &Bandwidths,
) -> Result<f64> {
    let kx = rbf_kernel(x_i, x, bw.sigma_x())?;
    let ku = if u_i.is_empty() && u.is_empty() {
        1.0
    } else {
        rbf_kernel(u_i, u, bw.sigma_u()?)?
    };
    let ka = rbf_kernel(a_i, a, bw.sigma_a())?;
    Ok(kx * ku * ka)
}

/// Median of the strictly positive pairwise Euclidean distances.
///
/// Even-length distance lists use the midpoint of the two central order
/// statistics. Errors when fewer than two samples exist or every pairwise
/// distance vanishes.
pub fn median_heuristic(samples: &Mat) -> Result<f64> {
    let n = samples.n_rows();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(samples.row(i), samples.row(j));
            if d > 0.0 {
                dists.push(d);
            }
        }
    }
    if dists.is_empty() {
        return Err(Error::DegenerateSamples);
    }
    dists.sort_unstable_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    let m = dists.len();
    Ok(if m % 2 == 1 {
        dists[m / 2]
    } else {
        0.5 * (dists[m / 2 - 1] + dists[m / 2])
    })
}

/// Dense matrix of kernel evaluations; entries lie in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    mat: Mat,
}

impl GramMatrix {
    /// Symmetric Gram matrix over one sample list with a plain RBF kernel.
    pub fn from_samples(samples: &Mat, sigma: f64) -> Result<Self> {
        check_sigma(sigma, "sigma")?;
        let n = samples.n_rows();
        let mut mat = Mat::zeros(n, n);
        for i in 0..n {
            mat.set(i, i, 1.0);
            for j in (i + 1)..n {
                let k = rbf_unchecked(samples.row(i), samples.row(j), sigma);
                mat.set(i, j, k);
                mat.set(j, i, k);
            }
        }
        Ok(GramMatrix { mat })
    }

    /// Symmetric Gram matrix of the joint product kernel over (x, u, a).
    pub fn from_joint_samples(x: &Mat, u: &Mat, a: &Mat, bw: &Bandwidths) -> Result<Self> {
        let n = x.n_rows();
        if u.n_rows() != n || a.n_rows() != n {
            return Err(Error::DimensionMismatch {
                what: "joint Gram block row counts",
                expected: n,
                got: if u.n_rows() != n { u.n_rows() } else { a.n_rows() },
            });
        }
        let with_u = u.n_cols() > 0;
        let sigma_u = if with_u { bw.sigma_u()? } else { 1.0 };
        let mut mat = Mat::zeros(n, n);
        for i in 0..n {
            mat.set(i, i, 1.0);
            for j in (i + 1)..n {
                let mut k = rbf_unchecked(x.row(i), x.row(j), bw.sigma_x());
                if with_u {
                    k *= rbf_unchecked(u.row(i), u.row(j), sigma_u);
                }
                k *= rbf_unchecked(a.row(i), a.row(j), bw.sigma_a());
                mat.set(i, j, k);
                mat.set(j, i, k);
            }
        }
        Ok(GramMatrix { mat })
    }

    pub fn n_rows(&self) -> usize {
        self.mat.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.mat.n_cols()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn as_mat(&self) -> &Mat {
        &self.mat
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.mat.matvec(v)
    }
}

/// Kernel vector `[k(rows_i, query)]_i` for a plain RBF kernel.
pub fn kernel_vector(rows: &Mat, query: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if rows.n_cols() != query.len() {
        return Err(Error::DimensionMismatch {
            what: "kernel_vector query",
            expected: rows.n_cols(),
            got: query.len(),
        });
    }
    check_sigma(sigma, "sigma")?;
    Ok((0..rows.n_rows())
        .map(|i| rbf_unchecked(rows.row(i), query, sigma))
        .collect())
}

/// Cholesky factorization of `K + nλI` with jitter escalation.
///
/// `K + nλI` is positive definite in exact arithmetic; jitter only has to
/// absorb floating-point round-off. On factorization failure a diagonal shift
/// of `1e-10 · trace(K)/n` is added and escalated tenfold up to
/// `1e-4 · trace(K)/n` before giving up.
#[derive(Debug, Clone)]
pub struct RidgeFactor {
    chol: Cholesky,
    n: usize,
    lambda: f64,
    jitter: f64,
}

impl RidgeFactor {
    pub fn new(k: &GramMatrix, lambda: f64, n: usize) -> Result<Self> {
        if !k.as_mat().is_square() {
            return Err(Error::DimensionMismatch {
                what: "ridge Gram matrix (square)",
                expected: k.n_rows(),
                got: k.n_cols(),
            });
        }
        if n != k.n_rows() {
            return Err(Error::DimensionMismatch {
                what: "ridge sample count",
                expected: k.n_rows(),
                got: n,
            });
        }
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::NonPositive {
                what: "lambda",
                value: lambda,
            });
        }
        let ridge = n as f64 * lambda;
        let base_jitter = 1e-10 * k.as_mat().trace() / n as f64;
        let max_jitter = 1e-4 * k.as_mat().trace() / n as f64;
        let mut jitter = 0.0;
        loop {
            let shifted = Mat::from_fn(n, n, |i, j| {
                let mut v = k.entry(i, j);
                if i == j {
                    v += ridge + jitter;
                }
                v
            });
            match Cholesky::factor(&shifted) {
                Ok(chol) => {
                    return Ok(RidgeFactor {
                        chol,
                        n,
                        lambda,
                        jitter,
                    })
                }
                Err(_) => {
                    jitter = if jitter == 0.0 { base_jitter } else { jitter * 10.0 };
                    if jitter > max_jitter {
                        return Err(Error::IllConditioned);
                    }
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Diagonal shift that was needed beyond `nλ` (0 in the usual case).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Solve `(K + nλI) z = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "ridge rhs length",
                expected: self.n,
                got: rhs.len(),
            });
        }
        Ok(self.chol.solve(rhs))
    }
}

/// One-shot solve of `(K + nλI) z = rhs` for a vector right-hand side.
pub fn ridge_solve(k: &GramMatrix, lambda: f64, n: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    RidgeFactor::new(k, lambda, n)?.solve(rhs)
}

/// One-shot solve of `(K + nλI) Z = RHS` column-wise for a matrix right-hand side.
pub fn ridge_solve_mat(k: &GramMatrix, lambda: f64, n: usize, rhs: &Mat) -> Result<Mat> {
    if rhs.n_rows() != n {
        return Err(Error::DimensionMismatch {
            what: "ridge rhs rows",
            expected: n,
            got: rhs.n_rows(),
        });
    }
    let factor = RidgeFactor::new(k, lambda, n)?;
    let mut out = Mat::zeros(rhs.n_rows(), rhs.n_cols());
    for j in 0..rhs.n_cols() {
        let col = factor.solve(&rhs.column(j))?;
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rbf_identity_is_one() {
        let k = rbf_kernel(&[1.0, 2.0], &[1.0, 2.0], 3.0).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn rbf_direct_values() {
        let k = rbf_kernel(&[0.0], &[2.0], libm::sqrt(2.0)).unwrap();
        assert!((k - libm::exp(-1.0)).abs() < 1e-15);
        let k = rbf_kernel(&[0.0, 0.0], &[3.0, 4.0], 5.0).unwrap();
        assert!((k - libm::exp(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn rbf_rejects_bad_input() {
        assert!(matches!(
            rbf_kernel(&[0.0], &[0.0, 1.0], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            rbf_kernel(&[0.0], &[1.0], 0.0),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            rbf_kernel(&[0.0], &[1.0], -1.5),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn product_kernel_identity_and_empty_u() {
        let bw = Bandwidths::new(1.0, Some(2.0), 3.0).unwrap();
        let k = product_kernel_h(&[1.0], &[2.0], &[3.0], &[1.0], &[2.0], &[3.0], &bw).unwrap();
        assert_eq!(k, 1.0);

        // Empty u factor is defined as 1 even when no sigma_u is stored.
        let bw = Bandwidths::new(1.0, None, 1.0).unwrap();
        let sq2 = libm::sqrt(2.0 * libm::log(2.0));
        // Pick points so each non-empty factor is 0.5.
        let k = product_kernel_h(&[0.0], &[], &[0.0], &[sq2], &[], &[sq2], &bw).unwrap();
        assert!((k - 0.25).abs() < 1e-12);
    }

    #[test]
    fn product_kernel_needs_sigma_u_for_nonempty_u() {
        let bw = Bandwidths::new(1.0, None, 1.0).unwrap();
        let e = product_kernel_h(&[0.0], &[1.0], &[0.0], &[0.0], &[1.0], &[0.0], &bw).unwrap_err();
        assert_eq!(e, Error::UncoveredBlock { block: "u" });
    }

    #[test]
    fn median_heuristic_examples() {
        // {0, 1, 2}: pairwise distances {1, 1, 2}, median 1.
        let m = Mat::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]);
        assert_eq!(median_heuristic(&m).unwrap(), 1.0);
        // Single pair.
        let m = Mat::from_rows(&[vec![0.0], vec![4.0]]);
        assert_eq!(median_heuristic(&m).unwrap(), 4.0);
        // Euclidean norm in 2-D.
        let m = Mat::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]);
        assert_eq!(median_heuristic(&m).unwrap(), 5.0);
    }

    #[test]
    fn median_heuristic_errors() {
        let m = Mat::from_rows(&[vec![1.0]]);
        assert!(matches!(
            median_heuristic(&m),
            Err(Error::TooFewSamples { .. })
        ));
        let m = Mat::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]);
        assert_eq!(median_heuristic(&m).unwrap_err(), Error::DegenerateSamples);
    }

    #[test]
    fn ridge_solve_scalar_and_diagonal() {
        // K=[[1]], n=1, λ=1: (1 + 1) z = 1 → z = 0.5.
        let k = GramMatrix::from_samples(&Mat::from_rows(&[vec![0.0]]), 1.0).unwrap();
        let z = ridge_solve(&k, 1.0, 1, &[1.0]).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-15);

        // K = I (distant samples): z = rhs / (1 + nλ).
        let n = 6;
        let samples = Mat::from_fn(n, 1, |i, _| 1e6 * i as f64);
        let k = GramMatrix::from_samples(&samples, 1.0).unwrap();
        let rhs: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let lambda = 0.25;
        let z = ridge_solve(&k, lambda, n, &rhs).unwrap();
        for i in 0..n {
            assert!((z[i] - rhs[i] / (1.0 + n as f64 * lambda)).abs() < 1e-12);
        }
    }

    #[test]
    fn ridge_solve_validates_inputs() {
        let k = GramMatrix::from_samples(&Mat::from_rows(&[vec![0.0], vec![1.0]]), 1.0).unwrap();
        assert!(matches!(
            ridge_solve(&k, 0.0, 2, &[1.0, 1.0]),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            ridge_solve(&k, 1.0, 3, &[1.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ridge_solve(&k, 1.0, 2, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_is_symmetric_unit_diagonal_in_range() {
        let mut rng = crate::rng::Rng::new(3);
        let samples = Mat::from_fn(12, 3, |_, _| rng.uniform_in(-2.0, 2.0));
        let g = GramMatrix::from_samples(&samples, 0.8).unwrap();
        for i in 0..12 {
            assert_eq!(g.entry(i, i), 1.0);
            for j in 0..12 {
                let v = g.entry(i, j);
                assert!((0.0..=1.0).contains(&v));
                assert!((v - g.entry(j, i)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn joint_gram_matches_scalar_kernel() {
        let mut rng = crate::rng::Rng::new(9);
        let x = Mat::from_fn(8, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let u = Mat::from_fn(8, 1, |_, _| rng.uniform_in(-1.0, 1.0));
        let a = Mat::from_fn(8, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let bw = Bandwidths::new(0.7, Some(1.1), 0.9).unwrap();
        let g = GramMatrix::from_joint_samples(&x, &u, &a, &bw).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let k = product_kernel_h(
                    x.row(i),
                    u.row(i),
                    a.row(i),
                    x.row(j),
                    u.row(j),
                    a.row(j),
                    &bw,
                )
                .unwrap();
                assert!((g.entry(i, j) - k).abs() <= 1e-15);
            }
        }
    }
}
