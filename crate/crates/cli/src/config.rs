//! Run configuration: built-in defaults, overridden by a flat `key = value`
//! file, overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use km2o_core::km2o::{OrthogonalityMode, TestSConfig};
use km2o_core::regime::{ClassifierConfig, Thresholds};
use km2o_core::strategy::IndicatorParams;
use km2o_core::transforms::DEFAULT_WINDOW;
use serde::Deserialize;

/// Settings shared by every subcommand. Each one can also be set in the
/// config file under the same name with dashes replaced by underscores.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat key = value config file
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Returns per window, minus one
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Relaxation factor for the stationarity test, in (0, 1]
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Lambda at or above which a day is stationary
    #[arg(long, global = true)]
    pub lambda1: Option<f64>,
    /// Lambda below which a day is non-stationary
    #[arg(long, global = true)]
    pub lambda2: Option<f64>,
    /// Moving-average length for the trend rule
    #[arg(long, global = true)]
    pub nma: Option<usize>,
    /// Psychological-line length for the contrarian rule
    #[arg(long, global = true)]
    pub npsy: Option<usize>,
    /// Allow an even --npsy
    #[arg(long, global = true)]
    pub allow_even_npsy: bool,
    /// Orthogonality denominator: sum or literal
    #[arg(long, global = true)]
    pub orthogonality: Option<OrthogonalityMode>,
    /// Lag budget for the orthogonality criterion
    #[arg(long, global = true)]
    pub lag_budget: Option<usize>,
    /// Input price CSV
    #[arg(long, short, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Directory for output files
    #[arg(long, short, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// RNG seed for synth
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub window: Option<usize>,
    pub alpha: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub nma: Option<usize>,
    pub npsy: Option<usize>,
    pub allow_even_npsy: Option<bool>,
    pub orthogonality: Option<String>,
    pub lag_budget: Option<usize>,
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("config {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub classifier: ClassifierConfig,
    pub thresholds: Thresholds,
    pub indicators: IndicatorParams,
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            classifier: ClassifierConfig::default(),
            thresholds: Thresholds::default(),
            indicators: IndicatorParams::new(10, 9),
            input: None,
            output_dir: PathBuf::from("."),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Layers `file` and then `flags` over the defaults and validates the result.
    pub fn resolve(flags: &Overrides, file: &FileConfig) -> Result<Self> {
        let d = RunConfig::default();
        let orthogonality = match (&flags.orthogonality, &file.orthogonality) {
            (Some(m), _) => *m,
            (None, Some(s)) => s
                .parse()
                .map_err(|e: String| km2o_core::Error::InvalidParameter {
                    field: "orthogonality",
                    message: e,
                })?,
            (None, None) => d.classifier.test.orthogonality,
        };
        let cfg = RunConfig {
            classifier: ClassifierConfig {
                window: flags.window.or(file.window).unwrap_or(DEFAULT_WINDOW),
                test: TestSConfig {
                    alpha: flags.alpha.or(file.alpha).unwrap_or(d.classifier.test.alpha),
                    orthogonality,
                    lag_budget: flags.lag_budget.or(file.lag_budget),
                },
            },
            thresholds: Thresholds {
                stationary: flags.lambda1.or(file.lambda1).unwrap_or(d.thresholds.stationary),
                non_stationary: flags.lambda2.or(file.lambda2).unwrap_or(d.thresholds.non_stationary),
            },
            indicators: IndicatorParams {
                n_ma: flags.nma.or(file.nma).unwrap_or(d.indicators.n_ma),
                n_psy: flags.npsy.or(file.npsy).unwrap_or(d.indicators.n_psy),
                allow_even_psy: flags.allow_even_npsy || file.allow_even_npsy.unwrap_or(false),
            },
            input: flags.input.clone().or_else(|| file.input.clone()),
            output_dir: flags.output_dir.clone().or_else(|| file.output_dir.clone()).unwrap_or(d.output_dir),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
        };
        cfg.classifier.validate()?;
        cfg.thresholds.validate()?;
        Ok(cfg)
    }

    pub fn load(flags: &Overrides) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::resolve(flags, &file)
    }

    pub fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| km2o_core::Error::InvalidParameter {
                field: "input",
                message: "no input file given (use --input or `input` in the config file)".into(),
            })
            .map_err(Into::into)
    }
}
