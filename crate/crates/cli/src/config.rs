//! Experiment manifests.
//!
//! ```toml
//! [data]
//! path = "sp500.csv"
//! mode = "raw_prices"
//! grouping = "sp500_sectors.txt"
//!
//! [run]
//! setting = "mixed"
//! output = "out/mixed"
//!
//! [erep]
//! lambda = 0.1
//! params = "ons"
//!
//! [baselines]
//! maons = true
//! orsad = true
//! walk_forward = { grid = [0.0, 0.1, 1.0], window = 60 }
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use erep_core::evaluation::{ReturnKind, WalkForwardConfig, DEFAULT_LAMBDA_GRID, TRADING_DAYS};
use erep_core::StrategySpec;
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::io::DataMode;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub erep: ErepConfig,
    #[serde(default)]
    pub baselines: BaselineConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub mode: DataMode,
    pub grouping: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    #[default]
    Mixed,
    OlmarOnly,
    Custom,
}

impl std::str::FromStr for Setting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixed" => Ok(Setting::Mixed),
            "olmar_only" => Ok(Setting::OlmarOnly),
            "custom" => Ok(Setting::Custom),
            other => Err(format!("unknown setting `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnConvention {
    #[default]
    Simple,
    Log,
}

impl From<ReturnConvention> for ReturnKind {
    fn from(r: ReturnConvention) -> Self {
        match r {
            ReturnConvention::Simple => ReturnKind::Simple,
            ReturnConvention::Log => ReturnKind::Log,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub setting: Setting,
    /// Base strategies for the custom setting, e.g. `"eg:0.05"`, `"anticor:20"`,
    /// `"olmar:20:10"`, `"ucrp"`.
    #[serde(default)]
    pub bases: Vec<String>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_periods")]
    pub periods_per_year: f64,
    #[serde(default)]
    pub returns: ReturnConvention,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            setting: Setting::default(),
            bases: Vec::new(),
            output: default_output(),
            periods_per_year: default_periods(),
            returns: ReturnConvention::default(),
        }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_periods() -> f64 {
    TRADING_DAYS
}

/// Where the Newton-step constants come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamPreset {
    /// `η = ½·min(α, 1/(4GD))`, `ε = 1/(η²D²)` with `G` estimated from the data.
    #[default]
    Theory,
    /// The classic online Newton step portfolio settings (`β = 1`, `δ = 1/8`, `A_0 = I`),
    /// i.e. `η = 4`, `ε = 1` in this step's scaling.
    Ons,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErepConfig {
    /// Fixed regularization weight. Exactly one of this and `walk_forward` must be set.
    pub lambda: Option<f64>,
    pub walk_forward: Option<WalkForwardSpec>,
    #[serde(default)]
    pub params: ParamPreset,
    /// Exp-concavity constant used by the theory preset.
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkForwardSpec {
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: usize,
    pub recalibrate_every: Option<usize>,
}

impl Default for WalkForwardSpec {
    fn default() -> Self {
        WalkForwardSpec {
            grid: default_grid(),
            window: default_window(),
            recalibrate_every: None,
        }
    }
}

fn default_grid() -> Vec<f64> {
    DEFAULT_LAMBDA_GRID.to_vec()
}

fn default_window() -> usize {
    60
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    #[serde(default)]
    pub maons: bool,
    #[serde(default)]
    pub orsad: bool,
    pub orsad_eta: Option<f64>,
    pub orsad_k: Option<f64>,
    /// Adds a walk-forward EREP row to comparisons run in fixed-λ mode.
    pub walk_forward: Option<WalkForwardSpec>,
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub setting: Option<Setting>,
    pub output: Option<PathBuf>,
    pub window: Option<usize>,
    pub grid: Option<Vec<f64>>,
}

/// How the EREP row is calibrated.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaMode {
    Fixed(f64),
    WalkForward(WalkForwardSpec),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.data.path = base.join(&cfg.data.path);
        cfg.data.grouping = base.join(&cfg.data.grouping);
        cfg.run.output = base.join(&cfg.run.output);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(l) = o.lambda {
            self.erep.lambda = Some(l);
            self.erep.walk_forward = None;
        }
        if let Some(s) = o.setting {
            self.run.setting = s;
        }
        if let Some(out) = &o.output {
            self.run.output = out.clone();
        }
        if o.window.is_some() || o.grid.is_some() {
            let target = if self.erep.walk_forward.is_some() {
                &mut self.erep.walk_forward
            } else {
                &mut self.baselines.walk_forward
            };
            let spec = target.get_or_insert_with(WalkForwardSpec::default);
            if let Some(w) = o.window {
                spec.window = w;
            }
            if let Some(g) = &o.grid {
                spec.grid = g.clone();
            }
        }
    }

    /// Checks everything that can be checked without touching the data.
    pub fn validate(&self) -> Result<()> {
        for p in [&self.data.path, &self.data.grouping] {
            if !p.is_file() {
                return Err(CliError::Config(format!("file not found: {}", p.display())));
            }
        }
        self.lambda_mode()?;
        self.bases()?;
        if !(self.run.periods_per_year > 0.0) {
            return Err(CliError::Config("periods_per_year must be > 0".into()));
        }
        Ok(())
    }

    pub fn lambda_mode(&self) -> Result<LambdaMode> {
        match (self.erep.lambda, &self.erep.walk_forward) {
            (Some(l), None) if l >= 0.0 && l.is_finite() => Ok(LambdaMode::Fixed(l)),
            (Some(l), None) => Err(CliError::Config(format!("lambda must be >= 0, got {l}"))),
            (None, Some(wf)) => Ok(LambdaMode::WalkForward(wf.clone())),
            (Some(_), Some(_)) => Err(CliError::Config(
                "set either erep.lambda or erep.walk_forward, not both".into(),
            )),
            (None, None) => Err(CliError::Config(
                "one of erep.lambda or erep.walk_forward is required".into(),
            )),
        }
    }

    pub fn bases(&self) -> Result<Vec<StrategySpec>> {
        let bases = match self.run.setting {
            Setting::Mixed => vec![
                StrategySpec::EG_DEFAULT,
                StrategySpec::ANTICOR_DEFAULT,
                StrategySpec::OLMAR_DEFAULT,
            ],
            Setting::OlmarOnly => [10, 15, 20].map(StrategySpec::olmar).to_vec(),
            Setting::Custom => self
                .run
                .bases
                .iter()
                .map(|s| parse_base(s))
                .collect::<Result<_>>()?,
        };
        if bases.is_empty() {
            return Err(CliError::Config(
                "custom setting needs at least one base".into(),
            ));
        }
        for b in &bases {
            b.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(bases)
    }

    pub fn walk_forward_config(&self, spec: &WalkForwardSpec) -> WalkForwardConfig {
        WalkForwardConfig {
            grid: spec.grid.clone(),
            window: spec.window,
            recalibrate_every: spec.recalibrate_every,
            returns: self.run.returns.into(),
            periods_per_year: self.run.periods_per_year,
        }
    }
}

/// `eg[:eta]`, `anticor[:window]`, `olmar[:window[:epsilon]]`, `ucrp`.
pub fn parse_base(s: &str) -> Result<StrategySpec> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let num = |i: usize| -> Result<Option<f64>> {
        parts
            .get(i)
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("bad number `{p}` in base `{s}`")))
            })
            .transpose()
    };
    let int = |i: usize| -> Result<Option<usize>> {
        parts
            .get(i)
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| CliError::Config(format!("bad window `{p}` in base `{s}`")))
            })
            .transpose()
    };
    let spec = match parts[0].to_ascii_lowercase().as_str() {
        "eg" if parts.len() <= 2 => StrategySpec::Eg {
            eta: num(1)?.unwrap_or(0.05),
        },
        "anticor" if parts.len() <= 2 => StrategySpec::Anticor {
            window: int(1)?.unwrap_or(20),
        },
        "olmar" if parts.len() <= 3 => StrategySpec::Olmar {
            window: int(1)?.unwrap_or(20),
            epsilon: num(2)?.unwrap_or(10.0),
        },
        "ucrp" if parts.len() == 1 => StrategySpec::UniformCrp,
        _ => return Err(CliError::Config(format!("unknown base strategy `{s}`"))),
    };
    Ok(spec)
}
