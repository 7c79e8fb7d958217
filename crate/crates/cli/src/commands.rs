use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Subcommand, ValueEnum};
use km2o_core::market_data::load_csv;
use km2o_core::regime::{
    abn_baseline, align_regimes, classify, lambda_series, load_regimes, summarize, window_verdicts, ClassifierConfig,
    LambdaPoint, LambdaSeries, Regime, RegimeSeries,
};
use km2o_core::km2o::TestSConfig;
use km2o_core::report::{fixed, fixed_json, write_report, Format, Report, SweepTable, Table, DECIMALS, RETURN_DECIMALS};
use km2o_core::strategy::{backtest, sweep, StrategyMode, SweepGrid};
use km2o_core::synth::{generate, SynthSpec};
use km2o_core::transforms::{to_ccr, window_pairs, CcrSeries};
use km2o_core::PriceSeries;
use log::info;
use serde_json::json;

use crate::config::{Overrides, RunConfig};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the log-return series, optionally with one window's pair series
    Transform {
        /// Transform pair `I,J` (0-based, I < J) to dump for --day
        #[arg(long, value_parser = parse_pair, requires = "day")]
        pair: Option<(usize, usize)>,
        /// Price day whose window the pair is cut from
        #[arg(long)]
        day: Option<usize>,
    },
    /// Score every day and write classification.csv and summary.json
    Classify {
        /// Also write per-pair verdicts to verdicts.csv
        #[arg(long)]
        verdicts: bool,
    },
    /// Run one backtest and write report.json and equity.csv
    Backtest {
        /// Use these `date,regime` labels instead of classifying
        #[arg(long, value_name = "FILE")]
        regimes: Option<PathBuf>,
        /// full, rule2-only or ma-only
        #[arg(long, default_value = "full")]
        mode: StrategyMode,
    },
    /// Backtest a parameter grid and write the ranked sweep.csv
    Sweep {
        #[arg(long, value_name = "FILE")]
        regimes: Option<PathBuf>,
        #[arg(long, default_value = "full")]
        mode: StrategyMode,
        /// Inclusive range of moving-average lengths
        #[arg(long, default_value = "5-30", value_parser = parse_range)]
        nma_range: (usize, usize),
        /// Psychological-line lengths
        #[arg(long, default_value = "3,5,7,9,11", value_delimiter = ',')]
        npsy_set: Vec<usize>,
    },
    /// Write a synthetic price series
    Synth {
        #[arg(long, value_enum, default_value_t = SynthKind::Walk)]
        kind: SynthKind,
        /// Number of prices
        #[arg(long, default_value_t = 2001)]
        length: usize,
        /// Drift of daily log-returns (walk only)
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Daily log-return volatility (before the switch for `switch`)
        #[arg(long, default_value_t = 0.01)]
        sigma: f64,
        /// Volatility from the switch day on
        #[arg(long)]
        sigma_after: Option<f64>,
        /// Price index of the first high-volatility return
        #[arg(long)]
        switch_day: Option<usize>,
        #[arg(long, default_value_t = SynthSpec::DEFAULT_START_PRICE)]
        start_price: f64,
        /// File name inside the output directory
        #[arg(long, default_value = "prices.csv")]
        output: PathBuf,
    },
    /// Regime fractions, return kurtosis and optional calibration curves
    Stats {
        /// Report the share of days with lambda = 1 at each of these alphas
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Vec<f64>,
        /// Also list the lambda = 0 spans of the conventional test
        #[arg(long)]
        abn: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Gaussian random walk in log price
    Walk,
    /// Volatility switch at --switch-day
    Switch,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected I,J")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').ok_or("expected LO-HI")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}-{b}"));
    }
    Ok((a, b))
}

pub fn run(command: Command, overrides: &Overrides) -> Result<()> {
    let cfg = RunConfig::load(overrides)?;
    fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    match command {
        Command::Transform { pair, day } => transform(&cfg, pair, day),
        Command::Classify { verdicts } => classify_cmd(&cfg, verdicts),
        Command::Backtest { regimes, mode } => backtest_cmd(&cfg, regimes.as_deref(), mode),
        Command::Sweep {
            regimes,
            mode,
            nma_range,
            npsy_set,
        } => sweep_cmd(&cfg, regimes.as_deref(), mode, nma_range, npsy_set),
        Command::Synth {
            kind,
            length,
            mu,
            sigma,
            sigma_after,
            switch_day,
            start_price,
            output,
        } => {
            let mut spec = match kind {
                SynthKind::Walk => SynthSpec::gaussian_walk(length, mu, sigma, cfg.seed),
                SynthKind::Switch => {
                    let (Some(after), Some(day)) = (sigma_after, switch_day) else {
                        bail!("--kind switch needs --sigma-after and --switch-day");
                    };
                    SynthSpec::variance_switch(length, sigma, after, day, cfg.seed)
                }
            };
            spec.start_price = start_price;
            let prices = generate(&spec)?;
            let path = cfg.output_dir.join(output);
            prices.save_csv(&path)?;
            wrote(&path);
            Ok(())
        }
        Command::Stats { alpha_grid, abn } => stats(&cfg, &alpha_grid, abn),
    }
}

fn wrote(path: &Path) {
    println!("{}", path.display());
}

fn load_prices(cfg: &RunConfig) -> Result<PriceSeries> {
    Ok(load_csv(cfg.input()?)?)
}

fn regimes_for(cfg: &RunConfig, prices: &PriceSeries, file: Option<&Path>) -> Result<Vec<Regime>> {
    match file {
        Some(path) => Ok(align_regimes(prices, &load_regimes(path)?)?),
        None => {
            info!("classifying {} days", prices.len());
            let lambdas = lambda_series(&to_ccr(prices), &cfg.classifier)?;
            Ok(classify(&lambdas, cfg.thresholds)?.for_prices(prices.len()))
        }
    }
}

fn transform(cfg: &RunConfig, pair: Option<(usize, usize)>, day: Option<usize>) -> Result<()> {
    let prices = load_prices(cfg)?;
    let ccr = to_ccr(&prices);
    let path = cfg.output_dir.join("ccr.csv");
    write_report(&ccr, Format::Csv, &path)?;
    wrote(&path);

    if let (Some((i, j)), Some(day)) = (pair, day) {
        if !(i < j && j < km2o_core::transforms::TRANSFORM_COUNT) {
            return Err(km2o_core::Error::InvalidParameter {
                field: "pair",
                message: format!("need I < J < {}, got {i},{j}", km2o_core::transforms::TRANSFORM_COUNT),
            }
            .into());
        }
        if day == 0 {
            bail!("--day must be >= 1: day 0 has no return");
        }
        let pairs = window_pairs(&ccr.values, day - 1, cfg.classifier.window)?;
        let p = pairs
            .iter()
            .find(|p| p.id == (i, j))
            .expect("every i < j pair is built");
        let mut t = Table::new(&["k", "first", "second"]);
        for (k, (a, b)) in p.first.iter().zip(&p.second).enumerate() {
            t.push(vec![
                (p.offset + k).to_string(),
                fixed(*a, RETURN_DECIMALS),
                fixed(*b, RETURN_DECIMALS),
            ]);
        }
        let path = cfg.output_dir.join(format!("pair_{i}_{j}_day{day}.csv"));
        write_report(&t, Format::Csv, &path)?;
        wrote(&path);
    }
    Ok(())
}

fn lambdas_with_verdicts(ccr: &CcrSeries, cfg: &ClassifierConfig) -> Result<(LambdaSeries, Table)> {
    let mut table = Table::new(&[
        "date", "pair_i", "pair_j", "rate_mean", "rate_var", "rate_orth", "passed", "degenerate",
    ]);
    let mut points = Vec::new();
    if ccr.len() <= cfg.window {
        return Err(km2o_core::Error::InsufficientHistory {
            needed: cfg.window + 1,
            index: ccr.len(),
        }
        .into());
    }
    for anchor in cfg.window..ccr.len() {
        let date = ccr.dates[anchor];
        let verdicts = window_verdicts(&ccr.values, anchor, cfg)?;
        let passed = verdicts.as_ref().map(|v| v.iter().filter(|(_, s)| s.passed).count());
        for ((i, j), v) in verdicts.iter().flatten() {
            table.push(vec![
                date.to_string(),
                i.to_string(),
                j.to_string(),
                fixed(v.rate_mean, DECIMALS),
                fixed(v.rate_var, DECIMALS),
                fixed(v.rate_orth, DECIMALS),
                v.passed.to_string(),
                v.degenerate.to_string(),
            ]);
        }
        points.push(LambdaPoint {
            day: anchor + 1,
            date,
            passed,
        });
    }
    Ok((
        LambdaSeries {
            points,
            alpha: cfg.test.alpha,
        },
        table,
    ))
}

fn classify_cmd(cfg: &RunConfig, verdicts: bool) -> Result<()> {
    let prices = load_prices(cfg)?;
    let ccr = to_ccr(&prices);
    let lambdas = if verdicts {
        let (lambdas, table) = lambdas_with_verdicts(&ccr, &cfg.classifier)?;
        let path = cfg.output_dir.join("verdicts.csv");
        write_report(&table, Format::Csv, &path)?;
        wrote(&path);
        lambdas
    } else {
        lambda_series(&ccr, &cfg.classifier)?
    };
    let regimes = classify(&lambdas, cfg.thresholds)?;
    write_classification(cfg, &ccr, &regimes)
}

fn write_classification(cfg: &RunConfig, ccr: &CcrSeries, regimes: &RegimeSeries) -> Result<()> {
    let path = cfg.output_dir.join("classification.csv");
    write_report(regimes, Format::Csv, &path)?;
    wrote(&path);
    let path = cfg.output_dir.join("summary.json");
    write_report(&summarize(ccr, regimes), Format::Json, &path)?;
    wrote(&path);
    Ok(())
}

fn backtest_cmd(cfg: &RunConfig, regimes: Option<&Path>, mode: StrategyMode) -> Result<()> {
    let prices = load_prices(cfg)?;
    cfg.indicators.validate()?;
    let labels = regimes_for(cfg, &prices, regimes)?;
    let result = backtest(&prices, &labels, cfg.indicators, mode)?;
    let path = cfg.output_dir.join("report.json");
    write_report(&result, Format::Json, &path)?;
    wrote(&path);
    let path = cfg.output_dir.join("equity.csv");
    write_report(&result, Format::Csv, &path)?;
    wrote(&path);
    Ok(())
}

fn sweep_cmd(
    cfg: &RunConfig,
    regimes: Option<&Path>,
    mode: StrategyMode,
    (lo, hi): (usize, usize),
    npsy_set: Vec<usize>,
) -> Result<()> {
    let prices = load_prices(cfg)?;
    let grid = SweepGrid {
        n_ma: (lo..=hi).collect(),
        n_psy: npsy_set,
        allow_even_psy: cfg.indicators.allow_even_psy,
    };
    for p in grid.params() {
        p.validate()?;
    }
    let labels = regimes_for(cfg, &prices, regimes)?;
    let rows = sweep(&prices, &labels, &grid, mode)?;
    let path = cfg.output_dir.join("sweep.csv");
    write_report(&SweepTable(&rows), Format::Csv, &path)?;
    wrote(&path);
    Ok(())
}

fn stats(cfg: &RunConfig, alpha_grid: &[f64], abn: bool) -> Result<()> {
    let prices = load_prices(cfg)?;
    let ccr = to_ccr(&prices);
    let lambdas = lambda_series(&ccr, &cfg.classifier)?;
    let regimes = classify(&lambdas, cfg.thresholds)?;
    let mut out = serde_json::Map::new();
    out.insert("summary".into(), summarize(&ccr, &regimes).json());
    out.insert("alpha".into(), fixed_json(cfg.classifier.test.alpha));
    out.insert("rate_lambda_one".into(), fixed_json(lambdas.full_pass_rate()));

    let grid = alpha_grid
        .iter()
        .map(|&alpha| {
            let c = ClassifierConfig {
                test: TestSConfig { alpha, ..cfg.classifier.test },
                ..cfg.classifier
            };
            let rate = lambda_series(&ccr, &c)?.full_pass_rate();
            Ok(json!({ "alpha": fixed_json(alpha), "rate_lambda_one": fixed_json(rate) }))
        })
        .collect::<Result<Vec<_>>>()?;
    if !grid.is_empty() {
        out.insert("alpha_grid".into(), grid.into());
    }

    if abn {
        let c = ClassifierConfig {
            test: TestSConfig {
                alpha: 1.0,
                ..cfg.classifier.test
            },
            ..cfg.classifier
        };
        let conventional = lambda_series(&ccr, &c)?;
        let spans = abn_baseline(&conventional)
            .into_iter()
            .map(|s| {
                json!({
                    "start": conventional.points[s.start].date.to_string(),
                    "end": conventional.points[s.end].date.to_string(),
                    "days": s.end - s.start + 1,
                })
            })
            .collect::<Vec<_>>();
        out.insert("abn_spans".into(), spans.into());
    }

    let path = cfg.output_dir.join("stats.json");
    write_report(&JsonOnly(serde_json::Value::Object(out)), Format::Json, &path)?;
    wrote(&path);
    Ok(())
}

struct JsonOnly(serde_json::Value);

impl Report for JsonOnly {
    fn table(&self) -> Table {
        let mut t = Table::new(&["json"]);
        t.push(vec![self.0.to_string()]);
        t
    }

    fn json(&self) -> serde_json::Value {
        self.0.clone()
    }
}
