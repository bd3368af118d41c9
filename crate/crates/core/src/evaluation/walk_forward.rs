use alloc::format;
use alloc::vec::Vec;

use super::metrics::{sharpe_ratio, ReturnKind, TRADING_DAYS};
use super::{BacktestReport, ReportBuilder};
use crate::erep::run_erep;
use crate::error::{Error, Result};
use crate::market::{Grouping, MarketSeries};
use crate::optimizer::CompositeStepParams;
use crate::strategies::StrategySpec;

pub const DEFAULT_LAMBDA_GRID: [f64; 7] = [0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct WalkForwardConfig {
    pub grid: Vec<f64>,
    /// Trailing window, in rounds, used to score each candidate.
    pub window: usize,
    /// Rounds between recalibrations; `None` means `max(1, window/4)`.
    pub recalibrate_every: Option<usize>,
    pub returns: ReturnKind,
    pub periods_per_year: f64,
}

impl WalkForwardConfig {
    pub fn new(grid: Vec<f64>, window: usize) -> Self {
        WalkForwardConfig {
            grid,
            window,
            recalibrate_every: None,
            returns: ReturnKind::Simple,
            periods_per_year: TRADING_DAYS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::param("walk-forward lambda grid is empty"));
        }
        if let Some(l) = self.grid.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return Err(Error::param(format!("grid lambda must be >= 0, got {l}")));
        }
        if self.window < 2 {
            return Err(Error::param("walk-forward window must be >= 2"));
        }
        if self.recalibrate_every == Some(0) {
            return Err(Error::param("recalibration period must be >= 1"));
        }
        Ok(())
    }

    fn sorted_grid(&self) -> Vec<f64> {
        let mut g = self.grid.clone();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }
}

#[derive(Debug, Clone)]
pub struct WalkForwardResult {
    /// λ used in each round.
    pub lambdas: Vec<f64>,
    pub report: BacktestReport,
    /// The window exceeded the data length and all available history was used instead.
    pub clipped: bool,
}

/// Full EREP runs for every grid value, in ascending λ order.
pub fn grid_runs(
    market: &MarketSeries,
    bases: &[StrategySpec],
    sectors: &Grouping,
    params: &CompositeStepParams,
    grid: &[f64],
) -> Result<Vec<(f64, BacktestReport)>> {
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g.into_iter()
        .map(|l| {
            let run = run_erep(market, bases, sectors, &params.with_lambda(l), "EREP")?;
            Ok((l, run.report))
        })
        .collect()
}

/// Walk-forward selection of λ. Every candidate is replayed from the first round; at each
/// recalibration the candidate with the best trailing-window Sharpe is used until the next
/// one.
pub fn walk_forward_lambda(
    market: &MarketSeries,
    bases: &[StrategySpec],
    sectors: &Grouping,
    params: &CompositeStepParams,
    cfg: &WalkForwardConfig,
) -> Result<WalkForwardResult> {
    cfg.validate()?;
    let runs = grid_runs(market, bases, sectors, params, &cfg.sorted_grid())?;
    walk_forward_from_runs(&runs, cfg)
}

/// Selection step of [`walk_forward_lambda`] over precomputed runs (ascending λ).
pub fn walk_forward_from_runs(
    runs: &[(f64, BacktestReport)],
    cfg: &WalkForwardConfig,
) -> Result<WalkForwardResult> {
    cfg.validate()?;
    let Some((_, first)) = runs.first() else {
        return Err(Error::param("no candidate runs"));
    };
    let t_max = first.n_rounds();
    if runs.iter().any(|(_, r)| r.n_rounds() != t_max) {
        return Err(Error::param("candidate runs have different lengths"));
    }
    let clipped = cfg.window > t_max;
    let min_history = if clipped { 2 } else { cfg.window };
    let period = cfg
        .recalibrate_every
        .unwrap_or_else(|| (cfg.window.min(t_max.max(1)) / 4).max(1));
    let returns: Vec<Vec<f64>> = runs.iter().map(|(_, r)| r.returns(cfg.returns)).collect();

    // lower median before any full window is available
    let mut current = (runs.len() - 1) / 2;
    let mut lambdas = Vec::with_capacity(t_max);
    let mut builder = ReportBuilder::new("EREP-WF", None);
    if clipped {
        builder.note(format!(
            "window {} exceeds the {} available rounds; all available history was used",
            cfg.window, t_max
        ));
    }
    for t in 0..t_max {
        if t >= min_history && t % period == 0 {
            let from = t.saturating_sub(cfg.window);
            let mut best = f64::NEG_INFINITY;
            let mut choice = None;
            for (i, r) in returns.iter().enumerate() {
                let s =
                    sharpe_ratio(&r[from..t], cfg.periods_per_year).unwrap_or(f64::NEG_INFINITY);
                if choice.is_none() || s > best {
                    best = s;
                    choice = Some(i);
                }
            }
            current = choice.unwrap_or(current);
        }
        lambdas.push(runs[current].0);
        builder.push_record(&runs[current].1.rounds[t]);
    }
    let mut report = builder.finish();
    report.lambda_path = lambdas.clone();
    Ok(WalkForwardResult {
        lambdas,
        report,
        clipped,
    })
}

/// Sharpe of the walk-forward trajectory for each window (`None` when undefined).
pub fn window_sensitivity(
    runs: &[(f64, BacktestReport)],
    windows: &[usize],
    base: &WalkForwardConfig,
) -> Result<Vec<(usize, Option<f64>)>> {
    windows
        .iter()
        .map(|&w| {
            let cfg = WalkForwardConfig {
                window: w,
                recalibrate_every: None,
                ..base.clone()
            };
            let res = walk_forward_from_runs(runs, &cfg)?;
            Ok((w, res.report.sharpe(cfg.returns, cfg.periods_per_year).ok()))
        })
        .collect()
}

/// `10, 20, …, 300`.
pub fn default_window_sweep() -> Vec<usize> {
    (1..=30).map(|i| 10 * i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fake(name: &str, growth: &[f64]) -> BacktestReport {
        let mut b = ReportBuilder::new(name, None);
        for &g in growth {
            b.push_round(None, vec![1.0], vec![1.0], g, -libm::log(g), 0.0, 1.0, true);
        }
        b.finish()
    }

    #[test]
    fn dominant_candidate_is_chosen_after_warm_up() {
        let weak: Vec<f64> = (0..40)
            .map(|t| if t % 2 == 0 { 1.01 } else { 0.995 })
            .collect();
        let strong: Vec<f64> = (0..40)
            .map(|t| if t % 2 == 0 { 1.02 } else { 1.0 })
            .collect();
        let runs = vec![(0.0, fake("a", &weak)), (0.1, fake("b", &strong))];
        let res =
            walk_forward_from_runs(&runs, &WalkForwardConfig::new(vec![0.0, 0.1], 8)).unwrap();
        assert!(res.lambdas[..8].iter().all(|&l| l == 0.0));
        assert!(res.lambdas[8..].iter().all(|&l| l == 0.1));
        assert!(!res.clipped);
    }

    #[test]
    fn long_window_is_flagged() {
        let g = [1.01, 0.99, 1.02, 1.0];
        let runs = vec![(0.1, fake("a", &g))];
        let res = walk_forward_from_runs(&runs, &WalkForwardConfig::new(vec![0.1], 50)).unwrap();
        assert!(res.clipped);
        assert_eq!(res.report.notes.len(), 1);
    }

    #[test]
    fn sweep_has_thirty_windows() {
        let w = default_window_sweep();
        assert_eq!(w.len(), 30);
        assert_eq!((w[0], w[29]), (10, 300));
    }
}
