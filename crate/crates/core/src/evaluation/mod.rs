//! Metrics, hindsight optimization, regret and walk-forward calibration.

mod diagnostics;
mod hindsight;
mod metrics;
mod report;
mod walk_forward;

pub use diagnostics::{lemma1_slack, lemma2_report, replay_lemma2, Lemma2Report};
pub use hindsight::{
    best_fixed_allocation, hindsight_from_payoffs, hindsight_objective, regret_curve,
    regret_from_payoffs, round_payoffs, HindsightSolution,
};
pub use metrics::{cumulative_wealth, sharpe_ratio, ReturnKind, TRADING_DAYS};
pub use report::{BacktestReport, ReportBuilder, RoundRecord};
pub use walk_forward::{
    default_window_sweep, grid_runs, walk_forward_from_runs, walk_forward_lambda,
    window_sensitivity, WalkForwardConfig, WalkForwardResult, DEFAULT_LAMBDA_GRID,
};
