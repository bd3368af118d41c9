use std::path::PathBuf;

use erep_core::baselines::{maons_run, orsad_run, OrsadParams};
use erep_core::erep::{portfolio_matrices, run_erep, run_strategy, EnsembleGrouping};
use erep_core::evaluation::{
    best_fixed_allocation, default_window_sweep, grid_runs, lemma2_report, regret_curve,
    walk_forward_from_runs, window_sensitivity, BacktestReport, Lemma2Report, ReturnKind,
    WalkForwardConfig,
};
use erep_core::optimizer::{gradient_norm_bound, theory_eta, CompositeStepParams};
use erep_core::{Grouping, MarketSeries, StrategySpec};

use crate::config::{LambdaMode, ParamPreset, RunConfig, WalkForwardSpec};
use crate::error::{CliError, Result};
use crate::io::{load_grouping, load_prices_csv};
use crate::report::{
    num, opt, write_compare_csv, write_lemma2, write_regret_csv, write_rounds_csv,
    write_sensitivity_csv, write_summary, CompareRow,
};

/// Loaded inputs shared by every command.
pub struct Workspace {
    pub cfg: RunConfig,
    pub market: MarketSeries,
    pub sectors: Grouping,
    pub bases: Vec<StrategySpec>,
}

impl Workspace {
    pub fn load(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let market = load_prices_csv(&cfg.data.path, cfg.data.mode)?;
        let sectors = load_grouping(&cfg.data.grouping, market.names())?;
        if !sectors.is_partition() {
            return Err(CliError::Config(format!(
                "{}: sectors must not overlap",
                cfg.data.grouping.display()
            )));
        }
        let bases = cfg.bases()?;
        Ok(Workspace {
            cfg,
            market,
            sectors,
            bases,
        })
    }

    fn returns(&self) -> ReturnKind {
        self.cfg.run.returns.into()
    }

    fn sharpe(&self, r: &BacktestReport) -> Option<f64> {
        r.sharpe(self.returns(), self.cfg.run.periods_per_year).ok()
    }

    fn out(&self, file: &str) -> PathBuf {
        self.cfg.run.output.join(file)
    }

    /// Newton-step constants for an ensemble over `dim` sub-algorithms.
    pub fn params(&self, dim: usize) -> Result<CompositeStepParams> {
        let e = &self.cfg.erep;
        let (eta, epsilon) = match e.params {
            ParamPreset::Theory => {
                let g = gradient_norm_bound(self.market.max_dispersion(), dim);
                theory_eta(e.alpha.unwrap_or(1.0), g, std::f64::consts::SQRT_2)?
            }
            ParamPreset::Ons => (4.0, 1.0),
        };
        let params = CompositeStepParams {
            eta: e.eta.unwrap_or(eta),
            epsilon: e.epsilon.unwrap_or(epsilon),
            ..CompositeStepParams::default()
        };
        params.validate()?;
        Ok(params)
    }

    fn ensemble_dim(&self) -> usize {
        self.bases.len() * self.sectors.len()
    }

    fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for g in self.sectors.groups() {
            for b in &self.bases {
                out.push(format!("{}@{}", b.label(), g.name));
            }
        }
        out
    }

    fn walk_forward(
        &self,
        spec: &WalkForwardSpec,
    ) -> Result<(WalkForwardConfig, Vec<(f64, BacktestReport)>)> {
        let wf = self.cfg.walk_forward_config(spec);
        wf.validate()?;
        let params = self.params(self.ensemble_dim())?;
        let runs = grid_runs(&self.market, &self.bases, &self.sectors, &params, &wf.grid)?;
        Ok((wf, runs))
    }

    fn orsad_params(&self) -> Result<OrsadParams> {
        let mut p = OrsadParams::for_market(&self.market, &self.sectors)?;
        if let Some(eta) = self.cfg.baselines.orsad_eta {
            p.eta = eta;
        }
        if let Some(k) = self.cfg.baselines.orsad_k {
            p.k = k;
        }
        p.validate(&self.sectors)?;
        Ok(p)
    }
}

/// What `backtest` produced.
#[derive(Debug, Clone)]
pub struct BacktestOutcome {
    pub report: BacktestReport,
    pub sharpe: Option<f64>,
    pub lemma2: Lemma2Report,
    pub files: Vec<PathBuf>,
}

pub fn cmd_backtest(ws: &Workspace) -> Result<BacktestOutcome> {
    let dim = ws.ensemble_dim();
    let params = ws.params(dim)?;
    let mut summary = vec![
        (
            "setting".to_string(),
            format!("{:?}", ws.cfg.run.setting).to_lowercase(),
        ),
        (
            "bases".into(),
            ws.bases
                .iter()
                .map(StrategySpec::label)
                .collect::<Vec<_>>()
                .join(" "),
        ),
        ("sectors".into(), ws.sectors.len().to_string()),
        ("sub_algorithms".into(), dim.to_string()),
        ("eta".into(), num(params.eta)),
        ("epsilon".into(), num(params.epsilon)),
    ];
    let report = match ws.cfg.lambda_mode()? {
        LambdaMode::Fixed(l) => {
            summary.push(("lambda".into(), num(l)));
            run_erep(
                &ws.market,
                &ws.bases,
                &ws.sectors,
                &params.with_lambda(l),
                "EREP",
            )?
            .report
        }
        LambdaMode::WalkForward(spec) => {
            let (wf, runs) = ws.walk_forward(&spec)?;
            let res = walk_forward_from_runs(&runs, &wf)?;
            summary.push(("lambda".into(), "walk_forward".into()));
            summary.push(("walk_forward_window".into(), wf.window.to_string()));
            summary.push(("walk_forward_clipped".into(), res.clipped.to_string()));
            res.report
        }
    };
    let sharpe = ws.sharpe(&report);
    let lemma2 = lemma2_report(&report, dim);
    summary.extend([
        ("rounds".into(), report.n_rounds().to_string()),
        ("total_return".into(), num(report.total_return())),
        ("log_wealth".into(), num(report.final_log_wealth())),
        ("sharpe".into(), opt(sharpe)),
        (
            "mean_max_sector_exposure".into(),
            num(report.mean_sector_exposure()),
        ),
        (
            "max_sector_exposure".into(),
            num(report.max_sector_exposure()),
        ),
        ("lemma2_statistic".into(), num(lemma2.statistic)),
        ("lemma2_bound".into(), num(lemma2.bound)),
        (
            "solver_warnings".into(),
            report.solver_warnings().to_string(),
        ),
    ]);
    for (i, n) in report.notes.iter().enumerate() {
        summary.push((format!("note_{}", i + 1), n.clone()));
    }
    let rounds = ws.out("erep_rounds.csv");
    let summary_path = ws.out("summary.txt");
    write_rounds_csv(&rounds, &report, ws.market.names(), &ws.labels())?;
    write_summary(&summary_path, &summary)?;
    Ok(BacktestOutcome {
        report,
        sharpe,
        lemma2,
        files: vec![rounds, summary_path],
    })
}

/// Rows in the fixed order: bases, MAons, ORSAD, EREP, EREP walk-forward.
pub fn cmd_compare(ws: &Workspace) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    let mut push = |name: String, r: &BacktestReport| {
        rows.push(CompareRow {
            algorithm: name,
            total_return: r.total_return(),
            sharpe: ws.sharpe(r),
        })
    };
    for b in &ws.bases {
        push(b.label(), &run_strategy(&ws.market, *b, &ws.sectors)?);
    }
    if ws.cfg.baselines.maons {
        let params = ws.params(ws.bases.len())?;
        push("MAons".into(), &maons_run(&ws.bases, &ws.market, &params)?);
    }
    if ws.cfg.baselines.orsad {
        push(
            "ORSAD".into(),
            &orsad_run(&ws.market, &ws.orsad_params()?, &ws.sectors)?,
        );
    }
    let params = ws.params(ws.ensemble_dim())?;
    let wf_spec = match ws.cfg.lambda_mode()? {
        LambdaMode::Fixed(l) => {
            let run = run_erep(
                &ws.market,
                &ws.bases,
                &ws.sectors,
                &params.with_lambda(l),
                "EREP",
            )?;
            push(format!("EREP(lambda={})", num(l)), &run.report);
            ws.cfg.baselines.walk_forward.clone()
        }
        LambdaMode::WalkForward(spec) => Some(spec),
    };
    if let Some(spec) = wf_spec {
        let (wf, runs) = ws.walk_forward(&spec)?;
        push(
            "EREP(lambda_WF)".into(),
            &walk_forward_from_runs(&runs, &wf)?.report,
        );
    }
    write_compare_csv(&ws.out("compare.csv"), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct DiagnoseOutcome {
    pub regret: Vec<f64>,
    pub lemma2: Vec<(String, Lemma2Report)>,
    pub sensitivity: Option<Vec<(usize, Option<f64>)>>,
}

/// Regret against the best fixed allocation, the `Σ‖∇g_t‖²_{A_t⁻¹}` statistic and, when a walk-forward
/// spec is present, the Sharpe-vs-window sweep.
///
/// In walk-forward mode λ changes over time, so regret is measured on the unregularized
/// losses (comparator with λ = 0) and that statistic is reported per candidate λ.
pub fn cmd_diagnose(ws: &Workspace) -> Result<DiagnoseOutcome> {
    let dim = ws.ensemble_dim();
    let params = ws.params(dim)?;
    let eg = EnsembleGrouping::new(&ws.sectors, ws.bases.len())?;
    let (regret, lemma2, wf_spec) = match ws.cfg.lambda_mode()? {
        LambdaMode::Fixed(l) => {
            let run = run_erep(
                &ws.market,
                &ws.bases,
                &ws.sectors,
                &params.with_lambda(l),
                "EREP",
            )?;
            let hind = best_fixed_allocation(&run.matrices, &ws.market, l, &eg)?;
            let curve = regret_curve(
                &run.report.regularized_losses(),
                &hind,
                &run.matrices,
                &ws.market,
                l,
                &eg,
            )?;
            let lemma2 = vec![(
                format!("lambda={}", num(l)),
                lemma2_report(&run.report, dim),
            )];
            (curve, lemma2, ws.cfg.baselines.walk_forward.clone())
        }
        LambdaMode::WalkForward(spec) => {
            let (wf, runs) = ws.walk_forward(&spec)?;
            let res = walk_forward_from_runs(&runs, &wf)?;
            let matrices = portfolio_matrices(&ws.market, &ws.bases, &ws.sectors)?;
            let hind = best_fixed_allocation(&matrices, &ws.market, 0.0, &eg)?;
            let losses: Vec<f64> = res.report.rounds.iter().map(|r| r.loss).collect();
            let curve = regret_curve(&losses, &hind, &matrices, &ws.market, 0.0, &eg)?;
            let lemma2 = runs
                .iter()
                .map(|(l, r)| (format!("lambda={}", num(*l)), lemma2_report(r, dim)))
                .collect();
            (curve, lemma2, Some(spec))
        }
    };
    write_regret_csv(&ws.out("regret.csv"), &regret)?;
    write_lemma2(&ws.out("lemma2.txt"), &lemma2)?;
    let sensitivity = match wf_spec {
        Some(spec) => {
            let (wf, runs) = ws.walk_forward(&spec)?;
            let rows = window_sensitivity(&runs, &default_window_sweep(), &wf)?;
            write_sensitivity_csv(&ws.out("window_sensitivity.csv"), &rows)?;
            Some(rows)
        }
        None => None,
    };
    Ok(DiagnoseOutcome {
        regret,
        lemma2,
        sensitivity,
    })
}
