use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::metrics::{sharpe_ratio, ReturnKind};
use crate::error::Result;

/// One traded round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub date: Option<String>,
    /// Stock portfolio held during the round.
    pub portfolio: Vec<f64>,
    /// Allocation over sub-algorithms; empty for algorithms that trade stocks directly.
    pub allocation: Vec<f64>,
    /// `⟨b, x⟩`.
    pub growth: f64,
    pub loss: f64,
    pub regularized_loss: f64,
    pub log_wealth: f64,
    pub lemma2_term: f64,
    pub lemma2_cumulative: f64,
    pub max_sector_exposure: f64,
    pub solver_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub name: String,
    /// Fixed regularization weight, if the run used one.
    pub lambda: Option<f64>,
    pub rounds: Vec<RoundRecord>,
    /// Per-round λ actually used, for walk-forward runs.
    pub lambda_path: Vec<f64>,
    /// Free-form flags raised during the run.
    pub notes: Vec<String>,
}

impl BacktestReport {
    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn final_log_wealth(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.log_wealth)
    }

    /// Final wealth multiple on an initial wealth of 1.
    pub fn total_return(&self) -> f64 {
        libm::exp(self.final_log_wealth())
    }

    pub fn returns(&self, kind: ReturnKind) -> Vec<f64> {
        self.rounds
            .iter()
            .map(|r| kind.of_growth(r.growth))
            .collect()
    }

    pub fn sharpe(&self, kind: ReturnKind, periods_per_year: f64) -> Result<f64> {
        sharpe_ratio(&self.returns(kind), periods_per_year)
    }

    pub fn regularized_losses(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.regularized_loss).collect()
    }

    pub fn lemma2_statistic(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.lemma2_cumulative)
    }

    pub fn solver_warnings(&self) -> usize {
        self.rounds.iter().filter(|r| !r.solver_converged).count()
    }

    pub fn max_sector_exposure(&self) -> f64 {
        self.rounds
            .iter()
            .map(|r| r.max_sector_exposure)
            .fold(0.0, f64::max)
    }

    pub fn mean_sector_exposure(&self) -> f64 {
        if self.rounds.is_empty() {
            return 0.0;
        }
        self.rounds
            .iter()
            .map(|r| r.max_sector_exposure)
            .sum::<f64>()
            / self.rounds.len() as f64
    }
}

/// Accumulates rounds, maintaining the running log-wealth and `Σ‖∇g_t‖²_{A_t⁻¹}`.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    report: BacktestReport,
    log_wealth: f64,
    lemma2: f64,
}

impl ReportBuilder {
    pub fn new(name: &str, lambda: Option<f64>) -> Self {
        ReportBuilder {
            report: BacktestReport {
                name: name.to_string(),
                lambda,
                rounds: Vec::new(),
                lambda_path: Vec::new(),
                notes: Vec::new(),
            },
            log_wealth: 0.0,
            lemma2: 0.0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push_round(
        &mut self,
        date: Option<&str>,
        portfolio: Vec<f64>,
        allocation: Vec<f64>,
        growth: f64,
        regularized_loss: f64,
        lemma2_term: f64,
        max_sector_exposure: f64,
        solver_converged: bool,
    ) {
        self.log_wealth += libm::log(growth);
        self.lemma2 += lemma2_term;
        self.report.rounds.push(RoundRecord {
            date: date.map(ToString::to_string),
            portfolio,
            allocation,
            growth,
            loss: -libm::log(growth),
            regularized_loss,
            log_wealth: self.log_wealth,
            lemma2_term,
            lemma2_cumulative: self.lemma2,
            max_sector_exposure,
            solver_converged,
        });
    }

    /// Re-accumulates an existing record (used when splicing trajectories).
    pub fn push_record(&mut self, r: &RoundRecord) {
        self.push_round(
            r.date.as_deref(),
            r.portfolio.clone(),
            r.allocation.clone(),
            r.growth,
            r.regularized_loss,
            r.lemma2_term,
            r.max_sector_exposure,
            r.solver_converged,
        );
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.report.notes.push(msg.into());
    }

    pub fn finish(self) -> BacktestReport {
        self.report
    }
}
