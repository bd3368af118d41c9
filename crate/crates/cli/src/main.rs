use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use erep_cli::config::Setting;
use erep_cli::{
    cmd_backtest, cmd_compare, cmd_diagnose, CliError, Overrides, RunConfig, Workspace,
};

#[derive(Parser)]
#[command(
    name = "erep",
    version,
    about = "Exposure-regularized portfolio ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run EREP and write the per-round table and a summary.
    Backtest(Common),
    /// Compare base strategies, baselines and EREP by total return and Sharpe.
    Compare(Common),
    /// Regret curve, gradient-norm statistic and the walk-forward window sweep.
    Diagnose(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Fixed regularization weight (switches off walk-forward calibration).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_parser = parse_setting)]
    setting: Option<Setting>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Walk-forward window in rounds.
    #[arg(long)]
    window: Option<usize>,
    /// Comma-separated walk-forward λ grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

fn parse_setting(s: &str) -> Result<Setting, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, which) = match cli.command {
        Command::Backtest(c) => (c, 0),
        Command::Compare(c) => (c, 1),
        Command::Diagnose(c) => (c, 2),
    };
    let mut cfg = RunConfig::load(&common.config)?;
    cfg.apply(&Overrides {
        lambda: common.lambda,
        setting: common.setting,
        output: common.out,
        window: common.window,
        grid: common.grid,
    });
    let ws = Workspace::load(cfg)?;
    let out = ws.cfg.run.output.display().to_string();
    match which {
        0 => {
            let o = cmd_backtest(&ws)?;
            println!(
                "total_return = {}  sharpe = {}",
                o.report.total_return(),
                o.sharpe.map_or("undefined".into(), |s| s.to_string())
            );
        }
        1 => {
            for r in cmd_compare(&ws)? {
                println!(
                    "{:<20} total_return = {:<12.6} sharpe = {}",
                    r.algorithm,
                    r.total_return,
                    r.sharpe.map_or("undefined".into(), |s| format!("{s:.4}"))
                );
            }
        }
        _ => {
            let o = cmd_diagnose(&ws)?;
            println!("final regret = {}", o.regret.last().copied().unwrap_or(0.0));
            for (label, l) in &o.lemma2 {
                println!(
                    "{label}: lemma2 {} <= {} : {}",
                    l.statistic, l.bound, l.satisfied
                );
            }
        }
    }
    println!("outputs written to {out}");
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
