#![allow(dead_code)]

use gkk_tau::Matrix;
use proptest::prelude::*;

pub fn matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(lo..hi, n * n).prop_map(move |v| Matrix::new(n, v).unwrap())
}

pub fn any_matrix(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| matrix(n, -2.0, 2.0))
}

pub fn symmetric(max_n: usize) -> impl Strategy<Value = Matrix> {
    any_matrix(max_n).prop_map(|a| {
        let n = a.order();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = 0.5 * (a.get(i, j) + a.get(j, i));
            }
        }
        Matrix::new(n, v).unwrap()
    })
}

/// G Gᵀ + δI.
pub fn positive_definite(max_n: usize) -> impl Strategy<Value = Matrix> {
    (any_matrix(max_n), 0.05f64..1.0).prop_map(|(g, d)| g.mul(&g.transpose()).unwrap().shifted(d))
}

/// s I − B with B ≥ 0 and s above the spectral radius of B.
pub fn m_matrix(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| (matrix(n, 0.0, 1.0), 0.05f64..1.0)).prop_map(|(b, eps)| {
        let n = b.order();
        let rowmax = (0..n)
            .map(|i| (0..n).map(|j| b.get(i, j)).sum::<f64>())
            .fold(0.0, f64::max);
        b.scaled(-1.0).shifted(rowmax + eps)
    })
}

/// Well-conditioned invertible matrix: I + small perturbation.
pub fn invertible(n: usize) -> impl Strategy<Value = Matrix> {
    matrix(n, -0.3 / n as f64, 0.3 / n as f64).prop_map(|e| e.shifted(1.0))
}
