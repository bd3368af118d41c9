#![allow(dead_code)]

use erep_core::linalg::Matrix;
use erep_core::MarketSeries;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    // exponential spacings give a uniform point on the simplex
    let e: Vec<f64> = (0..dim)
        .map(|_| -rng.gen_range(1e-12..1.0f64).ln())
        .collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// `BBᵀ + floor·I` with `B` uniform in [−1, 1].
pub fn random_pd(rng: &mut ChaCha8Rng, dim: usize, floor: f64) -> Matrix {
    let b: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut m = Matrix::scaled_identity(dim, floor);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] += (0..dim)
                .map(|k| b[i * dim + k] * b[j * dim + k])
                .sum::<f64>();
        }
    }
    m
}

/// i.i.d. relatives uniform in `[lo, hi]`.
pub fn iid_market(rng: &mut ChaCha8Rng, n: usize, days: usize, lo: f64, hi: f64) -> MarketSeries {
    let rows = (0..days)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();
    let names = (0..n).map(|i| format!("s{i}")).collect();
    MarketSeries::new(names, rows, None).unwrap()
}

/// Mean-reverting synthetic prices: each stock oscillates around a slow drift.
pub fn oscillating_market(rng: &mut ChaCha8Rng, n: usize, days: usize) -> MarketSeries {
    let phase: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let rows = (0..days)
        .map(|t| {
            (0..n)
                .map(|i| {
                    let s = (0.7 * t as f64 + phase[i]).sin();
                    1.0 + 0.02 * s + rng.gen_range(-0.01..0.01)
                })
                .collect()
        })
        .collect();
    let names = (0..n).map(|i| format!("s{i}")).collect();
    MarketSeries::new(names, rows, None).unwrap()
}
