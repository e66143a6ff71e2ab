//! Command-line front end.
//!
//! Every physical parameter can come from a flag or from a `key=value`
//! config file (`--config`); flags win. Keys use the flag names with `-` or
//! `_` interchangeably (`alpha-im` or `alpha_im`).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 too many failed fits.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::channel::{ChannelConfig, Gains, Probe};
use crate::error::{DataError, HarnessError};
use crate::estimator::{mle_fit, FitOptions};
use crate::harness::{
    plot_to_csv, report_to_csv, run_eta_sweep, run_n_scaling, run_table, ExperimentConfig,
    ExperimentReport, Sweep, SweepAxis,
};
use crate::homodyne::sample_dataset;
use crate::io::{
    dataset_from_csv, dataset_to_csv, fit_result_block, parse_key_values, write_atomic,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_FIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "homodyne-ml",
    version,
    about = "ML characterization of active optical media from homodyne data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a random-phase homodyne dataset and write it as CSV.
    Simulate(SimulateArgs),
    /// Fit (G1, G2) to a dataset CSV.
    Estimate(EstimateArgs),
    /// Ensemble study with G2 swept at fixed G1.
    Table(ExperimentArgs),
    /// Error versus number of data, with a power-law fit.
    Scaling(ExperimentArgs),
    /// Error versus detector efficiency.
    EtaSweep(ExperimentArgs),
}

#[derive(Debug, Args)]
struct Physics {
    /// key=value file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    g1: Option<f64>,
    #[arg(long)]
    g2: Option<f64>,
    /// Real part of the probe amplitude
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_im: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    physics: Physics,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    tol_loglik: Option<f64>,
    #[arg(long)]
    tol_param: Option<f64>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Dataset CSV to fit
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    fit: FitArgs,
    /// Output file for the result block (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated sweep values (G2, N or η depending on the command)
    #[arg(long)]
    values: Option<String>,
    /// Output directory for report.csv and plot.csv (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Fit(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Fit(_) => EXIT_FIT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Fit(m) => m,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::TooManyFailures { .. } => CliError::Fit(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Table(a) => experiment(a, SweepAxis::G2),
        Command::Scaling(a) => experiment(a, SweepAxis::NData),
        Command::EtaSweep(a) => experiment(a, SweepAxis::Eta),
    }
}

/// Config-file values, keyed with `_` separators.
struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig(BTreeMap::new()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let kv = parse_key_values(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Ok(FileConfig(
            kv.into_iter()
                .map(|(k, v)| (k.replace('-', "_"), v))
                .collect(),
        ))
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`"))),
            None => Ok(default),
        }
    }

    fn raw(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.0.get(key).cloned())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn fit_options(cfg: &FileConfig, a: FitArgs) -> Result<FitOptions, CliError> {
    let d = FitOptions::default();
    let opts = FitOptions {
        tol_loglik: cfg.pick(a.tol_loglik, "tol_loglik", d.tol_loglik)?,
        tol_param: cfg.pick(a.tol_param, "tol_param", d.tol_param)?,
        max_iters: cfg.pick(a.max_iters, "max_iters", d.max_iters)?,
        restarts: cfg.pick(a.restarts, "restarts", d.restarts)?,
    };
    opts.validate().map_err(usage)?;
    Ok(opts)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let p = a.physics;
    let cfg = FileConfig::load(p.config.as_deref())?;
    let gains =
        Gains::new(cfg.pick(p.g1, "g1", 3.0)?, cfg.pick(p.g2, "g2", 1.0)?).map_err(usage)?;
    let probe = Probe::new(
        cfg.pick(p.alpha, "alpha", 4.0)?,
        cfg.pick(p.alpha_im, "alpha_im", 0.0)?,
    )
    .map_err(usage)?;
    let channel = ChannelConfig::new(
        gains,
        cfg.pick(p.t, "t", 1.0)?,
        cfg.pick(p.eta, "eta", 0.6)?,
    )
    .map_err(usage)?;
    let n = cfg.pick(p.n, "n", 10_000)?;
    let seed = cfg.pick(p.seed, "seed", 0)?;
    let data = sample_dataset(probe, &channel, n, seed).map_err(usage)?;
    emit(a.out.as_deref(), &dataset_to_csv(&data))
}

fn estimate(a: EstimateArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(a.config.as_deref())?;
    let opts = fit_options(&cfg, a.fit)?;
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", a.input.display())))?;
    let data = dataset_from_csv(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", a.input.display())))?;
    let fit = mle_fit(&data, &opts).map_err(|e| CliError::Data(e.to_string()))?;
    emit(a.out.as_deref(), &fit_result_block(&fit))
}

fn parse_values(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad sweep value `{}`", s.trim())))
        })
        .collect()
}

fn experiment(a: ExperimentArgs, axis: SweepAxis) -> Result<(), CliError> {
    let p = a.physics;
    let cfg = FileConfig::load(p.config.as_deref())?;
    let base = match axis {
        SweepAxis::G2 => ExperimentConfig::table_defaults(),
        SweepAxis::NData => ExperimentConfig::scaling_defaults(),
        SweepAxis::Eta => ExperimentConfig::eta_defaults(),
    };
    let default_values = base.sweep.as_ref().expect("defaults sweep").values.clone();
    let values = match cfg.raw(a.values, "values") {
        Some(raw) => parse_values(&raw)?,
        None => default_values,
    };
    let gains = Gains::new(
        cfg.pick(p.g1, "g1", base.gains_true.g1())?,
        cfg.pick(p.g2, "g2", base.gains_true.g2())?,
    )
    .map_err(usage)?;
    let probe = Probe::new(
        cfg.pick(p.alpha, "alpha", base.probe.re())?,
        cfg.pick(p.alpha_im, "alpha_im", base.probe.im())?,
    )
    .map_err(usage)?;
    let config = ExperimentConfig {
        probe,
        gains_true: gains,
        time: cfg.pick(p.t, "t", base.time)?,
        eta: cfg.pick(p.eta, "eta", base.eta)?,
        n_data: cfg.pick(p.n, "n", base.n_data)?,
        n_trials: cfg.pick(a.trials, "trials", base.n_trials)?,
        base_seed: cfg.pick(p.seed, "seed", base.base_seed)?,
        sweep: Some(Sweep { axis, values }),
        fit: fit_options(&cfg, a.fit)?,
    };

    let (report, extra) = match axis {
        SweepAxis::G2 => (run_table(&config)?, None),
        SweepAxis::Eta => (run_eta_sweep(&config)?, None),
        SweepAxis::NData => {
            let (report, fit) = run_n_scaling(&config)?;
            let text = format!(
                "g1_slope={}\ng1_intercept={}\ng1_r2={}\ng2_slope={}\ng2_intercept={}\ng2_r2={}\n",
                fit.g1.slope,
                fit.g1.intercept,
                fit.g1.r_squared,
                fit.g2.slope,
                fit.g2.intercept,
                fit.g2.r_squared
            );
            (report, Some(text))
        }
    };
    write_experiment(a.out.as_deref(), &report, extra.as_deref())
}

fn write_experiment(
    out: Option<&Path>,
    report: &ExperimentReport,
    slopes: Option<&str>,
) -> Result<(), CliError> {
    let report_csv = report_to_csv(report);
    let plot_csv = plot_to_csv(report);
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(DataError::from)?;
            write_atomic(&dir.join("report.csv"), &report_csv)?;
            write_atomic(&dir.join("plot.csv"), &plot_csv)?;
            if let Some(s) = slopes {
                write_atomic(&dir.join("slopes.txt"), s)?;
            }
        }
        None => {
            print!("{report_csv}");
            if let Some(s) = slopes {
                print!("{s}");
            }
        }
    }
    Ok(())
}
