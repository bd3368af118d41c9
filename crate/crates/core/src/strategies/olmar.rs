use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::portfolio::{project_simplex, Portfolio};

/// Moving-average price-relative prediction `x̂_i = (1/m) Σ_j p_{t-j,i} / p_{t,i}`.
///
/// `prices` is ordered oldest first; the last row is the current price. When fewer than
/// `window` rows are available all of them are used (`m = min(window, rows)`).
pub fn predicted_relatives<R: AsRef<[f64]>>(prices: &[R], window: usize) -> Result<Vec<f64>> {
    let last = prices
        .last()
        .ok_or_else(|| Error::param("OLMAR needs at least one price row"))?
        .as_ref();
    let m = window.min(prices.len());
    let mut xhat = alloc::vec![0.0; last.len()];
    for row in &prices[prices.len() - m..] {
        let row = row.as_ref();
        if row.len() != last.len() {
            return Err(Error::dims(last.len(), row.len()));
        }
        for ((xh, &p), &pt) in xhat.iter_mut().zip(row).zip(last) {
            *xh += p / pt;
        }
    }
    xhat.iter_mut().for_each(|v| *v /= m as f64);
    Ok(xhat)
}

/// One OLMAR-1 step: move `b` toward the predicted relatives until `⟨b, x̂⟩ ≥ ε`, then
/// project back onto the simplex.
pub fn olmar_step<R: AsRef<[f64]>>(
    prices: &[R],
    b: &Portfolio,
    window: usize,
    eps: f64,
) -> Result<Portfolio> {
    let xhat = predicted_relatives(prices, window)?;
    if xhat.len() != b.len() {
        return Err(Error::dims(b.len(), xhat.len()));
    }
    let mean = xhat.iter().sum::<f64>() / xhat.len() as f64;
    let dev: Vec<f64> = xhat.iter().map(|v| v - mean).collect();
    let denom = dot(&dev, &dev);
    if denom == 0.0 {
        return Ok(b.clone());
    }
    let step = ((eps - dot(b, &xhat)) / denom).max(0.0);
    let moved: Vec<f64> = b.iter().zip(&dev).map(|(bi, d)| bi + step * d).collect();
    Portfolio::new(project_simplex(&moved)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_prices_leave_portfolio_unchanged() {
        let prices = vec![vec![2.0, 5.0]; 4];
        let b = Portfolio::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(olmar_step(&prices, &b, 3, 10.0).unwrap(), b);
    }

    #[test]
    fn short_history_uses_all_rows() {
        let prices = vec![vec![1.0, 1.0], vec![1.2, 0.8]];
        let xhat = predicted_relatives(&prices, 20).unwrap();
        assert!((xhat[0] - (1.0 + 1.0 / 1.2) / 2.0).abs() < 1e-15);
        assert!((xhat[1] - (1.0 + 1.0 / 0.8) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn diverging_pair_matches_scripted_oracle() {
        // Stock 0 rallies, stock 1 falls; OLMAR bets on reversion toward stock 1.
        // Expected weights frozen from an independent step-by-step script.
        let prices = vec![
            vec![1.0, 1.0],
            vec![1.05, 0.97],
            vec![1.12, 0.93],
            vec![1.20, 0.90],
        ];
        let b = Portfolio::new(vec![0.6, 0.4]).unwrap();
        let out = olmar_step(&prices, &b, 3, 1.01).unwrap();
        assert!((out[0] - OLMAR_ORACLE[0]).abs() < 1e-10, "{:?}", out);
        assert!((out[1] - OLMAR_ORACLE[1]).abs() < 1e-10, "{:?}", out);
    }

    const OLMAR_ORACLE: [f64; 2] = [0.267_889_908_256_881_5, 0.732_110_091_743_118_7];

    #[test]
    fn no_move_when_prediction_already_meets_threshold() {
        // ε below ⟨b, x̂⟩ means a zero step
        let prices = vec![vec![1.0, 1.0], vec![1.1, 0.9]];
        let b = Portfolio::new(vec![0.5, 0.5]).unwrap();
        let out = olmar_step(&prices, &b, 5, 0.5).unwrap();
        assert!((out[0] - 0.5).abs() < 1e-15);
    }
}
