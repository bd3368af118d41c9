//! CSV and key/value writers. Numbers use shortest round-trip formatting so outputs are
//! byte-stable across runs.

use std::fmt::Write as _;
use std::path::Path;

use erep_core::evaluation::{BacktestReport, Lemma2Report};

use crate::error::Result;
use crate::io::write_file;

pub(crate) fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "undefined".into()
    }
}

pub(crate) fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), num)
}

/// Per-round table: scalar diagnostics, then `b_<stock>` and `w_<sub-algorithm>` columns.
pub fn write_rounds_csv(
    path: &Path,
    report: &BacktestReport,
    stocks: &[String],
    allocation_labels: &[String],
) -> Result<()> {
    let mut out = String::from(
        "round,date,lambda,growth,loss,regularized_loss,log_wealth,lemma2_term,lemma2_cumulative,\
         max_sector_exposure,solver_converged",
    );
    for s in stocks {
        let _ = write!(out, ",b_{s}");
    }
    let with_w = report
        .rounds
        .first()
        .is_some_and(|r| !r.allocation.is_empty());
    if with_w {
        for l in allocation_labels {
            let _ = write!(out, ",w_{l}");
        }
    }
    out.push('\n');
    for (t, r) in report.rounds.iter().enumerate() {
        let lambda = report.lambda_path.get(t).copied().or(report.lambda);
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            t + 1,
            r.date.as_deref().unwrap_or(""),
            lambda.map_or(String::new(), num),
            num(r.growth),
            num(r.loss),
            num(r.regularized_loss),
            num(r.log_wealth),
            num(r.lemma2_term),
            num(r.lemma2_cumulative),
            num(r.max_sector_exposure),
            r.solver_converged
        );
        for v in &r.portfolio {
            let _ = write!(out, ",{}", num(*v));
        }
        if with_w {
            for v in &r.allocation {
                let _ = write!(out, ",{}", num(*v));
            }
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// `key = value` lines in the given order.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    write_file(path, &out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub algorithm: String,
    pub total_return: f64,
    pub sharpe: Option<f64>,
}

pub fn write_compare_csv(path: &Path, rows: &[CompareRow]) -> Result<()> {
    let mut out = String::from("algorithm,total_return,sharpe\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.algorithm,
            num(r.total_return),
            opt(r.sharpe)
        );
    }
    write_file(path, &out)
}

pub fn write_regret_csv(path: &Path, curve: &[f64]) -> Result<()> {
    let mut out = String::from("round,regret\n");
    for (t, r) in curve.iter().enumerate() {
        let _ = writeln!(out, "{},{}", t + 1, num(*r));
    }
    write_file(path, &out)
}

pub fn write_sensitivity_csv(path: &Path, rows: &[(usize, Option<f64>)]) -> Result<()> {
    let mut out = String::from("window,sharpe\n");
    for (w, s) in rows {
        let _ = writeln!(out, "{w},{}", opt(*s));
    }
    write_file(path, &out)
}

/// One block per labelled statistic.
pub fn write_lemma2(path: &Path, entries: &[(String, Lemma2Report)]) -> Result<()> {
    let mut out = String::new();
    for (label, r) in entries {
        let _ = writeln!(out, "[{label}]");
        let _ = writeln!(out, "statistic = {}", num(r.statistic));
        let _ = writeln!(out, "bound = {}", num(r.bound));
        let _ = writeln!(out, "satisfied = {}", r.satisfied);
    }
    write_file(path, &out)
}
