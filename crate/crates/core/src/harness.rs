//! Monte Carlo experiment runner.
//!
//! Each report row runs `n_trials` independent sample → fit cycles. Trial `i`
//! always uses seed `base_seed + i`, so any single trial can be replayed with
//! [`run_trial`]. Trials run in parallel but are collected in index order,
//! which keeps reports bit-identical between runs.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{ChannelConfig, Gains, Probe};
use crate::error::HarnessError;
use crate::estimator::{mle_fit, FitOptions, FitResult};
use crate::homodyne::{sample_dataset, GENERATOR_NAME};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Maximum fraction of failed trials for a row to be reported.
pub const MAX_FAILURE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NData,
    Eta,
    G2,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::NData => "n_data",
            SweepAxis::Eta => "eta",
            SweepAxis::G2 => "g2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub probe: Probe,
    pub gains_true: Gains,
    pub time: f64,
    pub eta: f64,
    pub n_data: usize,
    pub n_trials: usize,
    pub base_seed: u64,
    /// Without a sweep the report has a single row keyed by G2.
    pub sweep: Option<Sweep>,
    pub fit: FitOptions,
}

impl ExperimentConfig {
    /// The settings of the first row of the G1=3 table: α0 = 4, N = 10⁴,
    /// η = 0.6, t = 1, G2 swept over 1..=5.
    pub fn table_defaults() -> Self {
        ExperimentConfig {
            probe: Probe::real(4.0).expect("finite"),
            gains_true: Gains::new(3.0, 1.0).expect("valid"),
            time: 1.0,
            eta: 0.6,
            n_data: 10_000,
            n_trials: 50,
            base_seed: 1,
            sweep: Some(Sweep {
                axis: SweepAxis::G2,
                values: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            }),
            fit: FitOptions::default(),
        }
    }

    /// Error-versus-N study: G1=3, G2=5, η=0.6, α0=5, t=1.
    pub fn scaling_defaults() -> Self {
        ExperimentConfig {
            probe: Probe::real(5.0).expect("finite"),
            gains_true: Gains::new(3.0, 5.0).expect("valid"),
            time: 1.0,
            eta: 0.6,
            n_data: 1_000,
            n_trials: 20,
            base_seed: 1,
            sweep: Some(Sweep {
                axis: SweepAxis::NData,
                values: vec![1e3, 3e3, 1e4, 3e4, 1e5],
            }),
            fit: FitOptions::default(),
        }
    }

    /// Error-versus-efficiency study: N=5·10³, G1=2, G2=1, α0=8, t=1.
    pub fn eta_defaults() -> Self {
        ExperimentConfig {
            probe: Probe::real(8.0).expect("finite"),
            gains_true: Gains::new(2.0, 1.0).expect("valid"),
            time: 1.0,
            eta: 1.0,
            n_data: 5_000,
            n_trials: 20,
            base_seed: 1,
            sweep: Some(Sweep {
                axis: SweepAxis::Eta,
                values: vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            }),
            fit: FitOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        ChannelConfig::new(self.gains_true, self.time, self.eta)?;
        if self.n_data == 0 || self.n_trials == 0 {
            return Err(HarnessError::InvalidConfig(
                "n_data and n_trials must be positive".into(),
            ));
        }
        if !(self.time > 0.0) {
            return Err(HarnessError::InvalidConfig(
                "time must be positive to identify the gains".into(),
            ));
        }
        self.fit
            .validate()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(HarnessError::InvalidConfig("sweep has no values".into()));
            }
            if sweep.values.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(HarnessError::InvalidConfig(
                    "sweep values must be strictly ascending".into(),
                ));
            }
            for &v in &sweep.values {
                self.point(v)?;
            }
        }
        Ok(())
    }

    /// Settings at one sweep value.
    pub fn point(&self, value: f64) -> Result<TrialSettings, HarnessError> {
        let mut gains = self.gains_true;
        let mut eta = self.eta;
        let mut n = self.n_data;
        match self.sweep.as_ref().map(|s| s.axis) {
            Some(SweepAxis::G2) => gains = Gains::new(gains.g1(), value)?,
            Some(SweepAxis::Eta) => eta = value,
            Some(SweepAxis::NData) => {
                if !(value >= 1.0) || value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(HarnessError::InvalidConfig(format!(
                        "n_data sweep value {value} is not a positive integer"
                    )));
                }
                n = value as usize;
            }
            None => {}
        }
        Ok(TrialSettings {
            probe: self.probe,
            channel: ChannelConfig::new(gains, self.time, eta)?,
            n_data: n,
        })
    }

    fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) => s.values.clone(),
            None => vec![self.gains_true.g2()],
        }
    }

    fn axis(&self) -> SweepAxis {
        self.sweep.as_ref().map_or(SweepAxis::G2, |s| s.axis)
    }
}

/// Fully resolved settings of one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSettings {
    pub probe: Probe,
    pub channel: ChannelConfig,
    pub n_data: usize,
}

/// Ensemble statistics of one estimated component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentStats {
    pub mean: f64,
    /// Sample standard deviation of the estimates (NaN for a single trial).
    pub std: f64,
    /// Mean Fisher error over trials with finite error bars.
    pub fisher_mean: f64,
    pub fisher_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub sweep_value: f64,
    pub gains_true: Gains,
    pub g1: ComponentStats,
    pub g2: ComponentStats,
    pub trials: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub base_seed: u64,
    pub generator: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub axis: SweepAxis,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub provenance: Provenance,
}

/// Sample → fit for trial `index` at `settings`.
pub fn run_trial(
    settings: &TrialSettings,
    base_seed: u64,
    index: usize,
    fit: &FitOptions,
) -> Result<FitResult, HarnessError> {
    let seed = base_seed.wrapping_add(index as u64);
    let data = sample_dataset(settings.probe, &settings.channel, settings.n_data, seed)?;
    mle_fit(&data, fit).map_err(|e| HarnessError::InvalidConfig(e.to_string()))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn component(estimates: &[f64], errors: &[f64]) -> ComponentStats {
    let (mean, std) = mean_std(estimates);
    let finite: Vec<f64> = errors.iter().copied().filter(|e| e.is_finite()).collect();
    let (fisher_mean, fisher_std) = if finite.is_empty() {
        (f64::INFINITY, f64::NAN)
    } else {
        mean_std(&finite)
    };
    ComponentStats {
        mean,
        std,
        fisher_mean,
        fisher_std,
    }
}

/// Runs every row of the configured sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let mut rows = Vec::new();
    for value in config.sweep_values() {
        let settings = config.point(value)?;
        let fits: Vec<Option<FitResult>> = (0..config.n_trials)
            .into_par_iter()
            .map(|i| {
                run_trial(&settings, config.base_seed, i, &config.fit)
                    .ok()
                    .filter(|f| f.converged)
            })
            .collect();
        let ok: Vec<&FitResult> = fits.iter().flatten().collect();
        let failed = config.n_trials - ok.len();
        if failed as f64 > MAX_FAILURE_FRACTION * config.n_trials as f64 {
            return Err(HarnessError::TooManyFailures {
                sweep_value: value,
                failed,
                total: config.n_trials,
            });
        }
        let pick = |f: fn(&FitResult) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<f64>>();
        rows.push(ReportRow {
            sweep_value: value,
            gains_true: settings.channel.gains(),
            g1: component(&pick(|r| r.gains_hat.g1()), &pick(|r| r.err.0)),
            g2: component(&pick(|r| r.gains_hat.g2()), &pick(|r| r.err.1)),
            trials: config.n_trials,
            failed,
        });
    }
    Ok(ExperimentReport {
        axis: config.axis(),
        config: config.clone(),
        rows,
        provenance: Provenance {
            base_seed: config.base_seed,
            generator: GENERATOR_NAME.to_string(),
            version: VERSION.to_string(),
        },
    })
}

fn require_axis(config: &ExperimentConfig, axis: SweepAxis) -> Result<(), HarnessError> {
    match &config.sweep {
        Some(s) if s.axis == axis => Ok(()),
        _ => Err(HarnessError::InvalidConfig(format!(
            "expected a sweep over {}",
            axis.name()
        ))),
    }
}

/// Fixed G1, swept G2.
pub fn run_table(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    require_axis(config, SweepAxis::G2)?;
    run_experiment(config)
}

/// Power-law fits of the mean Fisher error against N, one per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub g1: PowerLawFit,
    pub g2: PowerLawFit,
}

pub fn run_n_scaling(
    config: &ExperimentConfig,
) -> Result<(ExperimentReport, ScalingFit), HarnessError> {
    require_axis(config, SweepAxis::NData)?;
    let values = &config.sweep.as_ref().expect("checked").values;
    if values.len() < 4 {
        return Err(HarnessError::InvalidConfig(
            "N scaling needs at least 4 sweep points".into(),
        ));
    }
    let span = (values[values.len() - 1] / values[0]).log10();
    if !(span >= 1.5) {
        return Err(HarnessError::InvalidConfig(format!(
            "N sweep spans {span:.2} decades, need at least 1.5"
        )));
    }
    let report = run_experiment(config)?;
    let fit = scaling_fit(&report)?;
    Ok((report, fit))
}

/// Fits log(mean Fisher error) against log(sweep value) for both components.
pub fn scaling_fit(report: &ExperimentReport) -> Result<ScalingFit, HarnessError> {
    let pts = |f: fn(&ReportRow) -> f64| -> Vec<(f64, f64)> {
        report.rows.iter().map(|r| (r.sweep_value, f(r))).collect()
    };
    Ok(ScalingFit {
        g1: fit_power_law(&pts(|r| r.g1.fisher_mean))?,
        g2: fit_power_law(&pts(|r| r.g2.fisher_mean))?,
    })
}

pub fn run_eta_sweep(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    require_axis(config, SweepAxis::Eta)?;
    run_experiment(config)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on `(ln n, ln err)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, HarnessError> {
    if points.len() < 3 {
        return Err(HarnessError::PowerLaw("need at least 3 points"));
    }
    if points
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite())
    {
        return Err(HarnessError::PowerLaw(
            "all values must be positive and finite",
        ));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::PowerLaw("all abscissae are equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
    })
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub const REPORT_HEADER: &str =
    "sweep_value,g1_true,g2_true,g1_mean,g1_std,g1_fisher,g2_mean,g2_std,g2_fisher,trials";

pub const PLOT_HEADER: &str = "x,y1,y1err,y2,y2err";

fn provenance_block(report: &ExperimentReport) -> String {
    let c = &report.config;
    let p = &report.provenance;
    let mut out = String::new();
    let _ = writeln!(out, "# base_seed={}", p.base_seed);
    let _ = writeln!(out, "# generator={}", p.generator);
    let _ = writeln!(out, "# version={}", p.version);
    let _ = writeln!(out, "# axis={}", report.axis.name());
    let _ = writeln!(out, "# alpha_re={}", c.probe.re());
    let _ = writeln!(out, "# alpha_im={}", c.probe.im());
    let _ = writeln!(out, "# g1={}", c.gains_true.g1());
    let _ = writeln!(out, "# g2={}", c.gains_true.g2());
    let _ = writeln!(out, "# t={}", c.time);
    let _ = writeln!(out, "# eta={}", c.eta);
    let _ = writeln!(out, "# n_data={}", c.n_data);
    let _ = writeln!(out, "# n_trials={}", c.n_trials);
    let _ = writeln!(
        out,
        "# fit=tol_loglik:{},tol_param:{},max_iters:{},restarts:{}",
        c.fit.tol_loglik, c.fit.tol_param, c.fit.max_iters, c.fit.restarts
    );
    out
}

pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = provenance_block(report);
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.sweep_value,
            r.gains_true.g1(),
            r.gains_true.g2(),
            r.g1.mean,
            r.g1.std,
            r.g1.fisher_mean,
            r.g2.mean,
            r.g2.std,
            r.g2.fisher_mean,
            r.trials
        );
    }
    out
}

/// Plot data. For a G2 sweep the y columns are the mean estimates with the
/// ensemble spread; for N or η sweeps they are the mean Fisher errors with
/// their spread across trials.
pub fn plot_to_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(PLOT_HEADER);
    out.push('\n');
    for r in &report.rows {
        let (y1, e1, y2, e2) = match report.axis {
            SweepAxis::G2 => (r.g1.mean, r.g1.std, r.g2.mean, r.g2.std),
            SweepAxis::NData | SweepAxis::Eta => (
                r.g1.fisher_mean,
                r.g1.fisher_std,
                r.g2.fisher_mean,
                r.g2.fisher_std,
            ),
        };
        let _ = writeln!(out, "{},{},{},{},{}", r.sweep_value, y1, e1, y2, e2);
    }
    out
}
