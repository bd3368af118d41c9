use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::market::MarketSeries;

/// Trading days per year used to annualize daily Sharpe ratios.
pub const TRADING_DAYS: f64 = 252.0;

/// How a round's wealth factor is turned into a return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnKind {
    /// `⟨b, x⟩ − 1`.
    #[default]
    Simple,
    /// `log⟨b, x⟩`.
    Log,
}

impl ReturnKind {
    pub fn of_growth(self, growth: f64) -> f64 {
        match self {
            ReturnKind::Simple => growth - 1.0,
            ReturnKind::Log => libm::log(growth),
        }
    }
}

/// `∏_t ⟨b_t, x_t⟩` for a portfolio sequence.
pub fn cumulative_wealth<B: AsRef<[f64]>>(portfolios: &[B], market: &MarketSeries) -> Result<f64> {
    if portfolios.len() != market.n_days() {
        return Err(Error::dims(market.n_days(), portfolios.len()));
    }
    let mut log_w = 0.0;
    for (t, b) in portfolios.iter().enumerate() {
        let b = b.as_ref();
        if b.len() != market.n_stocks() {
            return Err(Error::dims(market.n_stocks(), b.len()));
        }
        let g = dot(b, market.day(t));
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::data(format!("wealth factor {g} on day {t}")));
        }
        log_w += libm::log(g);
    }
    Ok(libm::exp(log_w))
}

/// Annualized Sharpe ratio with zero risk-free rate: `mean / std · √periods`, where `std` is
/// the sample standard deviation.
pub fn sharpe_ratio(returns: &[f64], periods_per_year: f64) -> Result<f64> {
    if returns.len() < 2 {
        return Err(Error::UndefinedSharpe("fewer than two returns"));
    }
    if !(periods_per_year > 0.0) {
        return Err(Error::param("periods per year must be > 0"));
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
    let sd = libm::sqrt(var);
    if !(sd > 1e-13 * (1.0 + mean.abs())) {
        return Err(Error::UndefinedSharpe("zero variance"));
    }
    Ok(mean / sd * libm::sqrt(periods_per_year))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn sharpe_examples() {
        let alt: Vec<f64> = (0..10)
            .map(|i| if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        assert_eq!(sharpe_ratio(&alt, 252.0).unwrap(), 0.0);
        assert!(matches!(
            sharpe_ratio(&[0.01; 30], 252.0),
            Err(Error::UndefinedSharpe(_))
        ));
        assert!(sharpe_ratio(&[0.01], 252.0).is_err());
        // mean 0.02, sample sd 0.01
        let s = sharpe_ratio(&[0.01, 0.02, 0.03], 1.0).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wealth_examples() {
        let names = vec!["a".to_string(), "b".to_string()];
        let flat = MarketSeries::new(names.clone(), vec![vec![1.0, 1.0]; 5], None).unwrap();
        let b = vec![vec![0.3, 0.7]; 5];
        assert_eq!(cumulative_wealth(&b, &flat).unwrap(), 1.0);

        let doubling = MarketSeries::new(names, vec![vec![2.0, 1.0]; 10], None).unwrap();
        let e1 = vec![vec![1.0, 0.0]; 10];
        let w = cumulative_wealth(&e1, &doubling).unwrap();
        assert!((w - 1024.0).abs() < 1e-9);
        assert!(cumulative_wealth(&e1[..3], &doubling).is_err());
    }
}
