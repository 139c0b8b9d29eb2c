//! Kernel-layer checks against independent solvers.

#![allow(clippy::needless_range_loop)]

mod support;

use auf_core::kernels::{
    median_heuristic, product_kernel_h, rbf_kernel, ridge_solve, ridge_solve_mat, Bandwidths,
    GramMatrix,
};
use auf_core::linalg::Mat;
use auf_core::rng::Rng;
use support::{gaussian_solve, symmetric_eigenvalues};

fn random_gram(n: usize, dim: usize, sigma: f64, seed: u64) -> (Mat, GramMatrix) {
    let mut rng = Rng::new(seed);
    let samples = Mat::from_fn(n, dim, |_, _| rng.uniform_in(-2.0, 2.0));
    let gram = GramMatrix::from_samples(&samples, sigma).unwrap();
    (samples, gram)
}

#[test]
fn ridge_solve_matches_gaussian_elimination() {
    for seed in 0..5u64 {
        let n = 20;
        let (_, gram) = random_gram(n, 3, 0.9, seed);
        let lambda = 0.05;
        let mut rng = Rng::new(1000 + seed);
        let rhs: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();

        let z = ridge_solve(&gram, lambda, n, &rhs).unwrap();

        let shifted = Mat::from_fn(n, n, |i, j| {
            gram.entry(i, j) + if i == j { n as f64 * lambda } else { 0.0 }
        });
        let oracle = gaussian_solve(&shifted, &rhs);
        for i in 0..n {
            assert!(
                (z[i] - oracle[i]).abs() < 1e-9,
                "component {i}: {} vs {}",
                z[i],
                oracle[i]
            );
        }
    }
}

#[test]
fn ridge_solve_residual_bound() {
    let n = 40;
    let (_, gram) = random_gram(n, 4, 0.7, 7);
    let lambda = 0.02;
    let mut rng = Rng::new(77);
    let rhs: Vec<f64> = (0..n).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
    let z = ridge_solve(&gram, lambda, n, &rhs).unwrap();

    let mut max_residual: f64 = 0.0;
    let mut max_rhs: f64 = 0.0;
    for i in 0..n {
        let mut acc = n as f64 * lambda * z[i];
        for j in 0..n {
            acc += gram.entry(i, j) * z[j];
        }
        max_residual = max_residual.max((acc - rhs[i]).abs());
        max_rhs = max_rhs.max(rhs[i].abs());
    }
    assert!(max_residual <= 1e-8 * (1.0 + max_rhs), "residual {max_residual}");
}

#[test]
fn ridge_solve_columns_reconstruct_inverse() {
    let n = 12;
    let (_, gram) = random_gram(n, 2, 1.1, 9);
    let lambda = 0.1;
    let identity = Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64);
    let inv = ridge_solve_mat(&gram, lambda, n, &identity).unwrap();
    // (K + nλI) · inv should be the identity.
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                let a = gram.entry(i, k) + if i == k { n as f64 * lambda } else { 0.0 };
                acc += a * inv.get(k, j);
            }
            let expect = (i == j) as u8 as f64;
            assert!((acc - expect).abs() < 1e-9, "({i},{j}) = {acc}");
        }
    }
}

#[test]
fn gram_matrices_are_numerically_psd() {
    for seed in [0u64, 3, 8] {
        let (_, gram) = random_gram(16, 3, 0.6, seed);
        let eigs = symmetric_eigenvalues(gram.as_mat());
        for e in eigs {
            assert!(e >= -1e-8, "eigenvalue {e}");
        }
    }
    // Joint product kernel Grams as well.
    let mut rng = Rng::new(4);
    let x = Mat::from_fn(14, 2, |_, _| rng.uniform_in(-1.0, 1.0));
    let u = Mat::from_fn(14, 1, |_, _| rng.uniform_in(-1.0, 1.0));
    let a = Mat::from_fn(14, 2, |_, _| rng.uniform_in(-1.0, 1.0));
    let bw = Bandwidths::new(0.8, Some(0.5), 1.2).unwrap();
    let gram = GramMatrix::from_joint_samples(&x, &u, &a, &bw).unwrap();
    for e in symmetric_eigenvalues(gram.as_mat()) {
        assert!(e >= -1e-8, "joint eigenvalue {e}");
    }
}

#[test]
fn product_kernel_equals_scaled_concatenation() {
    // k_x·k_u·k_a == exp(−Σ_blocks ‖Δ‖²/(2σ_block²)), checked numerically on
    // random triples.
    let bw = Bandwidths::new(0.7, Some(1.3), 0.4).unwrap();
    let mut rng = Rng::new(21);
    for _ in 0..100 {
        let draw = |rng: &mut Rng, d: usize| -> Vec<f64> {
            (0..d).map(|_| rng.uniform_in(-2.0, 2.0)).collect()
        };
        let (x_i, u_i, a_i) = (draw(&mut rng, 2), draw(&mut rng, 3), draw(&mut rng, 2));
        let (x, u, a) = (draw(&mut rng, 2), draw(&mut rng, 3), draw(&mut rng, 2));
        let product = product_kernel_h(&x_i, &u_i, &a_i, &x, &u, &a, &bw).unwrap();

        let sq = |p: &[f64], q: &[f64]| -> f64 {
            p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
        };
        let exponent = sq(&x_i, &x) / (2.0 * 0.7 * 0.7)
            + sq(&u_i, &u) / (2.0 * 1.3 * 1.3)
            + sq(&a_i, &a) / (2.0 * 0.4 * 0.4);
        let direct = (-exponent).exp();
        assert!(
            (product - direct).abs() <= 1e-12 * direct.max(1e-30),
            "{product} vs {direct}"
        );
    }
}

#[test]
fn median_heuristic_is_order_invariant() {
    let mut rng = Rng::new(33);
    let rows: Vec<Vec<f64>> = (0..9)
        .map(|_| (0..3).map(|_| rng.uniform_in(-5.0, 5.0)).collect())
        .collect();
    let base = median_heuristic(&Mat::from_rows(&rows)).unwrap();
    // A few deterministic shuffles.
    for rot in 1..rows.len() {
        let mut rotated = rows.clone();
        rotated.rotate_left(rot);
        let m = median_heuristic(&Mat::from_rows(&rotated)).unwrap();
        assert_eq!(m, base);
    }
}

#[test]
fn rbf_symmetry_and_range_on_random_inputs() {
    // Ranges kept clear of the regime where exp underflows to exactly zero
    // (that behavior is legitimate and covered by the optimizer tests).
    let mut rng = Rng::new(55);
    for _ in 0..200 {
        let d = 1 + (rng.next_u64() % 4) as usize;
        let v: Vec<f64> = (0..d).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
        let sigma = rng.uniform_in(0.5, 5.0);
        let k1 = rbf_kernel(&v, &w, sigma).unwrap();
        let k2 = rbf_kernel(&w, &v, sigma).unwrap();
        assert_eq!(k1, k2);
        assert!(k1 > 0.0 && k1 <= 1.0);
        if v != w {
            assert!(k1 < 1.0);
        }
    }
}
