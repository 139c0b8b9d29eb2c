//! Independent numerical oracles for integration tests. Nothing here shares
//! code with the solver paths under test.

#![allow(dead_code, clippy::needless_range_loop)]

use auf_core::linalg::Mat;

/// Dense Gaussian elimination with partial pivoting; solves `A x = b`.
pub fn gaussian_solve(a: &Mat, b: &[f64]) -> Vec<f64> {
    let n = a.n_rows();
    assert!(a.is_square() && b.len() == n);
    let mut m = vec![vec![0.0f64; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = a.get(i, j);
        }
        m[i][n] = b[i];
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| m[p][col].abs().partial_cmp(&m[q][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        assert!(m[col][col] != 0.0, "singular system");
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = m[row][n];
        for k in (row + 1)..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    x
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.n_rows();
    assert!(a.is_square());
    let mut m = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = 0.5 * (a.get(i, j) + a.get(j, i));
        }
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-30 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    xb.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xa.len(), xb.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let v = xa[i].min(xb[j]);
        while i < n && xa[i] <= v {
            i += 1;
        }
        while j < m && xb[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    // Kolmogorov tail series.
    let mut p = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
    }
    (d, p.clamp(0.0, 1.0))
}

/// Standard normal CDF from an independent erf series (Abramowitz-Stegun 7.1.26
/// style rational approximation would be too coarse; use a Taylor/continued
/// fraction hybrid accurate to ~1e-12 on the range used in tests).
pub fn normal_cdf_reference(x: f64) -> f64 {
    // Integrate the density with fine Simpson steps from 0 to |x|.
    let steps = 4000;
    let t = x.abs();
    let h = t / steps as f64;
    let density = |v: f64| (-0.5 * v * v).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = density(0.0) + density(t);
    for k in 1..steps {
        let v = k as f64 * h;
        acc += density(v) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half_mass = acc * h / 3.0;
    if x >= 0.0 {
        0.5 + half_mass
    } else {
        0.5 - half_mass
    }
}
