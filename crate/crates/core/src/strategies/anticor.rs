use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::portfolio::Portfolio;

/// Log-relative standard deviations at or below this are treated as zero variance.
const ZERO_STD: f64 = 1e-12;

struct WindowStats {
    mean: Vec<f64>,
    std: Vec<f64>,
    centered: Vec<Vec<f64>>,
}

fn window_stats<R: AsRef<[f64]>>(rows: &[R], n: usize) -> WindowStats {
    let w = rows.len();
    let logs: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.as_ref().iter().map(|&v| libm::log(v)).collect())
        .collect();
    let mut mean = vec![0.0; n];
    for row in &logs {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= w as f64);
    let centered: Vec<Vec<f64>> = logs
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();
    let std = (0..n)
        .map(|i| {
            let ss: f64 = centered.iter().map(|r| r[i] * r[i]).sum();
            libm::sqrt(ss / (w - 1) as f64)
        })
        .collect();
    WindowStats {
        mean,
        std,
        centered,
    }
}

/// One Anticor rebalancing step over the last `2·window` relatives in `history`.
///
/// Wealth moves from stock `i` to stock `j` when `i` outperformed `j` over the most recent
/// window and the lagged cross-correlation `Mcor(i, j)` is positive. Returns `b` unchanged
/// while fewer than `2·window` rows are available.
pub fn anticor_step<R: AsRef<[f64]>>(
    history: &[R],
    b: &Portfolio,
    window: usize,
) -> Result<Portfolio> {
    if window < 2 {
        return Err(Error::param("Anticor window must be at least 2"));
    }
    let n = b.len();
    if history.len() < 2 * window {
        return Ok(b.clone());
    }
    if let Some(r) = history.iter().find(|r| r.as_ref().len() != n) {
        return Err(Error::dims(n, r.as_ref().len()));
    }
    let recent = &history[history.len() - 2 * window..];
    let first = window_stats(&recent[..window], n);
    let second = window_stats(&recent[window..], n);

    let mut corr = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if first.std[i] <= ZERO_STD || second.std[j] <= ZERO_STD {
                continue;
            }
            let cov: f64 = first
                .centered
                .iter()
                .zip(&second.centered)
                .map(|(a, c)| a[i] * c[j])
                .sum::<f64>()
                / (window - 1) as f64;
            corr[i][j] = cov / (first.std[i] * second.std[j]);
        }
    }

    let mut claims = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && second.mean[i] > second.mean[j] && corr[i][j] > 0.0 {
                claims[i][j] = corr[i][j] + (-corr[i][i]).max(0.0) + (-corr[j][j]).max(0.0);
            }
        }
    }

    let mut next = b.to_vec();
    for i in 0..n {
        let total: f64 = claims[i].iter().sum();
        if total <= 0.0 {
            continue;
        }
        for j in 0..n {
            let moved = b[i] * claims[i][j] / total;
            next[i] -= moved;
            next[j] += moved;
        }
    }
    next.iter_mut().for_each(|v| *v = v.max(0.0));
    Portfolio::new(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_history_is_warm_up() {
        let h = vec![vec![1.1, 0.9]; 5];
        let b = Portfolio::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(anticor_step(&h, &b, 3).unwrap(), b);
    }

    #[test]
    fn identical_paths_transfer_nothing() {
        let h: Vec<Vec<f64>> = (0..8)
            .map(|t| vec![1.0 + 0.01 * (t % 3) as f64; 3])
            .collect();
        let b = Portfolio::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(anticor_step(&h, &b, 4).unwrap(), b);
    }

    #[test]
    fn constant_relatives_have_zero_variance() {
        let h = vec![vec![1.01, 0.99, 1.0]; 8];
        let b = Portfolio::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(anticor_step(&h, &b, 4).unwrap(), b);
    }

    #[test]
    fn anti_correlated_paths_match_scripted_oracle() {
        let out = anticor_step(
            &ANTICOR_HISTORY,
            &Portfolio::new(vec![0.5, 0.3, 0.2]).unwrap(),
            4,
        )
        .unwrap();
        for (o, e) in out.iter().zip(ANTICOR_ORACLE) {
            assert!((o - e).abs() < 1e-10, "{out:?}");
        }
    }

    // Stock 1 led the recent window and is positively lag-correlated with both others,
    // so its wealth splits between stocks 0 and 2. Frozen from an independent script.
    const ANTICOR_HISTORY: [[f64; 3]; 8] = [
        [1.01, 0.98, 0.99],
        [1.0, 0.98, 0.99],
        [1.03, 0.99, 1.0],
        [0.99, 1.01, 1.02],
        [1.0, 1.03, 0.99],
        [0.97, 1.04, 0.97],
        [1.01, 1.01, 0.99],
        [1.04, 0.99, 1.01],
    ];

    const ANTICOR_ORACLE: [f64; 3] = [0.657_572_651_084_314_3, 0.0, 0.342_427_348_915_685_7];
}
