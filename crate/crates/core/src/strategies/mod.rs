//! Base online portfolio strategies.
//!
//! Every strategy starts from the uniform portfolio, observes one day of relatives at a time
//! and emits the portfolio it wants to hold the following day. Strategies without enough
//! history keep their previous portfolio.

mod anticor;
mod eg;
mod olmar;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use anticor::anticor_step;
pub use eg::eg_update;
pub use olmar::{olmar_step, predicted_relatives};

use crate::error::{Error, Result};
use crate::portfolio::Portfolio;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategySpec {
    /// Exponentiated gradient with learning rate `eta`.
    Eg {
        eta: f64,
    },
    Anticor {
        window: usize,
    },
    /// OLMAR-1 (simple moving average) with reversion threshold `epsilon`.
    Olmar {
        window: usize,
        epsilon: f64,
    },
    UniformCrp,
}

impl StrategySpec {
    pub const EG_DEFAULT: StrategySpec = StrategySpec::Eg { eta: 0.05 };
    pub const ANTICOR_DEFAULT: StrategySpec = StrategySpec::Anticor { window: 20 };
    pub const OLMAR_DEFAULT: StrategySpec = StrategySpec::Olmar {
        window: 20,
        epsilon: 10.0,
    };

    pub fn olmar(window: usize) -> Self {
        StrategySpec::Olmar {
            window,
            epsilon: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StrategySpec::Eg { eta } if !(eta > 0.0 && eta.is_finite()) => Err(Error::param(
                format!("EG learning rate must be > 0, got {eta}"),
            )),
            StrategySpec::Anticor { window } if window < 2 => Err(Error::param(format!(
                "Anticor window must be >= 2, got {window}"
            ))),
            StrategySpec::Olmar { window, .. } if window < 2 => Err(Error::param(format!(
                "OLMAR window must be >= 2, got {window}"
            ))),
            StrategySpec::Olmar { epsilon, .. } if !(epsilon > 1.0 && epsilon.is_finite()) => Err(
                Error::param(format!("OLMAR epsilon must be > 1, got {epsilon}")),
            ),
            _ => Ok(()),
        }
    }

    /// Short display name, e.g. `OLMAR(w=20)`.
    pub fn label(&self) -> String {
        match *self {
            StrategySpec::Eg { .. } => "EG".into(),
            StrategySpec::Anticor { window } => format!("Anticor(w={window})"),
            StrategySpec::Olmar { window, .. } => format!("OLMAR(w={window})"),
            StrategySpec::UniformCrp => "UCRP".into(),
        }
    }

    /// Rows of history the strategy needs to keep.
    fn memory(&self) -> usize {
        match *self {
            StrategySpec::Eg { .. } | StrategySpec::UniformCrp => 0,
            StrategySpec::Anticor { window } => 2 * window,
            StrategySpec::Olmar { window, .. } => window,
        }
    }
}

/// Mutable state of one running strategy.
#[derive(Debug, Clone)]
pub struct StrategyState {
    spec: StrategySpec,
    portfolio: Portfolio,
    /// Relatives for Anticor; reconstructed prices (first price = 1) for OLMAR.
    history: VecDeque<Vec<f64>>,
    last_prices: Option<Vec<f64>>,
    rounds: usize,
}

impl StrategyState {
    pub fn new(spec: StrategySpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("strategy over zero stocks"));
        }
        spec.validate()?;
        let mut history = VecDeque::with_capacity(spec.memory() + 1);
        let mut last_prices = None;
        if let StrategySpec::Olmar { .. } = spec {
            let p0 = alloc::vec![1.0; n];
            history.push_back(p0.clone());
            last_prices = Some(p0);
        }
        Ok(StrategyState {
            spec,
            portfolio: Portfolio::uniform(n),
            history,
            last_prices,
            rounds: 0,
        })
    }

    pub fn spec(&self) -> &StrategySpec {
        &self.spec
    }

    /// Portfolio to hold for the next day.
    pub fn portfolio(&self) -> &Portfolio {
        &self.portfolio
    }

    pub fn n_stocks(&self) -> usize {
        self.portfolio.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Feeds one day of relatives and returns the portfolio for the next day.
    pub fn observe(&mut self, x: &[f64]) -> Result<&Portfolio> {
        let n = self.n_stocks();
        if x.len() != n {
            return Err(Error::dims(n, x.len()));
        }
        if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::data("relative prices must be finite and > 0"));
        }
        self.rounds += 1;
        let next = match self.spec {
            StrategySpec::UniformCrp => return Ok(&self.portfolio),
            StrategySpec::Eg { eta } => eg_update(&self.portfolio, x, eta)?,
            StrategySpec::Anticor { window } => {
                self.remember(x.to_vec());
                self.history.make_contiguous();
                anticor_step(self.history.as_slices().0, &self.portfolio, window)?
            }
            StrategySpec::Olmar { window, epsilon } => {
                let prev = self.last_prices.as_ref().expect("OLMAR keeps prices");
                let p: Vec<f64> = prev.iter().zip(x).map(|(p, r)| p * r).collect();
                self.last_prices = Some(p.clone());
                self.remember(p);
                self.history.make_contiguous();
                olmar_step(self.history.as_slices().0, &self.portfolio, window, epsilon)?
            }
        };
        self.portfolio = next;
        Ok(&self.portfolio)
    }

    fn remember(&mut self, row: Vec<f64>) {
        self.history.push_back(row);
        while self.history.len() > self.spec.memory() {
            self.history.pop_front();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::{on_simplex, SIMPLEX_TOL};
    use alloc::vec;

    #[test]
    fn starts_uniform() {
        let s = StrategyState::new(StrategySpec::EG_DEFAULT, 4).unwrap();
        assert_eq!(s.portfolio().weights(), &[0.25; 4]);
    }

    #[test]
    fn olmar_window_one_rejected() {
        assert!(StrategyState::new(
            StrategySpec::Olmar {
                window: 1,
                epsilon: 10.0
            },
            3
        )
        .is_err());
        assert!(StrategySpec::Eg { eta: 0.0 }.validate().is_err());
        assert!(StrategySpec::Olmar {
            window: 5,
            epsilon: 1.0
        }
        .validate()
        .is_err());
        assert!(StrategySpec::Anticor { window: 1 }.validate().is_err());
    }

    #[test]
    fn uniform_crp_never_moves() {
        let mut s = StrategyState::new(StrategySpec::UniformCrp, 2).unwrap();
        for x in [[1.2, 0.8], [0.5, 2.0], [1.0, 1.0]] {
            assert_eq!(s.observe(&x).unwrap().weights(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn anticor_waits_for_two_windows() {
        let mut s = StrategyState::new(StrategySpec::Anticor { window: 3 }, 2).unwrap();
        for t in 0..5 {
            let x = if t % 2 == 0 { [1.1, 0.9] } else { [0.9, 1.1] };
            assert_eq!(s.observe(&x).unwrap().weights(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn olmar_state_matches_direct_price_window() {
        let xs = [
            [1.05, 0.97],
            [1.0667, 0.9588],
            [1.0714, 0.9677],
            [0.98, 1.03],
        ];
        let mut s = StrategyState::new(
            StrategySpec::Olmar {
                window: 3,
                epsilon: 1.02,
            },
            2,
        )
        .unwrap();
        let mut prices = vec![vec![1.0, 1.0]];
        let mut b = Portfolio::uniform(2);
        for x in xs {
            let last = prices.last().unwrap().clone();
            prices.push(vec![last[0] * x[0], last[1] * x[1]]);
            let lo = prices.len().saturating_sub(3);
            b = olmar_step(&prices[lo..], &b, 3, 1.02).unwrap();
            assert_eq!(s.observe(&x).unwrap(), &b);
        }
    }

    #[test]
    fn emitted_portfolios_stay_on_simplex() {
        let specs = [
            StrategySpec::EG_DEFAULT,
            StrategySpec::Anticor { window: 2 },
            StrategySpec::olmar(3),
        ];
        for spec in specs {
            let mut s = StrategyState::new(spec, 3).unwrap();
            for t in 0..30 {
                let f = (t as f64 * 0.7).sin() * 0.05;
                let b = s.observe(&[1.0 + f, 1.0 - f, 1.0 + 0.5 * f]).unwrap();
                assert!(on_simplex(b, SIMPLEX_TOL), "{spec:?} {b:?}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_relatives() {
        let mut s = StrategyState::new(StrategySpec::EG_DEFAULT, 2).unwrap();
        assert!(s.observe(&[1.0, 0.0]).unwrap_err().is_data_violation());
    }
}
