//! Random-phase homodyne statistics of the transmitted probe.
//!
//! At local-oscillator phase `φ` the detected quadrature is Gaussian with
//! mean `g·Re(α0 e^{−iφ})` and variance `s²/2`, where
//! `s² = δ² + g²/2 + (1−η)/(2η)` folds the detector efficiency in as added
//! noise.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::channel::{check_eta, ChannelConfig, DerivedChannel, Probe};
use crate::error::HomodyneError;
use crate::quadrature::{integrate_refined, GaussLegendre};

/// Name recorded in dataset metadata for the sample generator.
pub const GENERATOR_NAME: &str = "chacha20-seed_from_u64/box-muller";

/// Integration half-width in standard deviations for the numeric marginal.
const ORACLE_SIGMAS: f64 = 8.0;
const ORACLE_NODES: usize = 201;
const ORACLE_REFINE_TOL: f64 = 1e-9;
const ORACLE_FAIL_TOL: f64 = 1e-8;
const ORACLE_MAX_LEVELS: usize = 6;

/// One homodyne outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSample {
    /// Local-oscillator phase in [0, π).
    pub phase: f64,
    pub value: f64,
}

/// Known measurement setup: probe amplitude, interaction time, efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub probe: Probe,
    pub time: f64,
    pub eta: f64,
}

impl Setup {
    pub fn new(probe: Probe, time: f64, eta: f64) -> Result<Self, HomodyneError> {
        crate::channel::check_time(time)?;
        check_eta(eta)?;
        Ok(Setup { probe, time, eta })
    }

    pub fn from_config(probe: Probe, config: &ChannelConfig) -> Self {
        Setup {
            probe,
            time: config.time(),
            eta: config.eta(),
        }
    }
}

/// A homodyne record together with the metadata needed to fit or replay it.
///
/// The true gains are deliberately not part of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<QuadratureSample>,
    pub setup: Setup,
    pub seed: u64,
    pub generator: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `s² = δ² + g²/2 + (1−η)/(2η)`.
pub fn total_variance_param(channel: &DerivedChannel, eta: f64) -> Result<f64, HomodyneError> {
    check_eta(eta)?;
    Ok(channel.s_sq + efficiency_noise(eta))
}

fn efficiency_noise(eta: f64) -> f64 {
    (1.0 - eta) / (2.0 * eta)
}

/// Closed-form homodyne density for fixed probe and channel.
#[derive(Debug, Clone, Copy)]
pub struct HomodyneModel {
    probe: Probe,
    g: f64,
    s_sq: f64,
    half_log_norm: f64,
}

impl HomodyneModel {
    pub fn new(probe: Probe, config: &ChannelConfig) -> Self {
        let ch = config.derive();
        let s_sq = ch.s_sq + efficiency_noise(config.eta());
        Self::from_moments(probe, ch.g, s_sq)
    }

    /// Model from the amplitude factor `g` and detected `s²` directly.
    pub fn from_moments(probe: Probe, g: f64, s_sq: f64) -> Self {
        HomodyneModel {
            probe,
            g,
            s_sq,
            half_log_norm: 0.5 * (PI * s_sq).ln(),
        }
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn s_sq(&self) -> f64 {
        self.s_sq
    }

    pub fn mean(&self, phi: f64) -> f64 {
        self.g * self.probe.projection(phi)
    }

    /// Quadrature variance `s²/2`.
    pub fn variance(&self) -> f64 {
        0.5 * self.s_sq
    }

    pub fn pdf(&self, x: f64, phi: f64) -> f64 {
        let d = x - self.mean(phi);
        (-d * d / self.s_sq).exp() / (PI * self.s_sq).sqrt()
    }

    pub fn logpdf(&self, x: f64, phi: f64) -> f64 {
        let d = x - self.mean(phi);
        -self.half_log_norm - d * d / self.s_sq
    }
}

/// `p(x; φ)` for a coherent probe through the configured medium.
pub fn homodyne_pdf(x: f64, phi: f64, probe: Probe, config: &ChannelConfig) -> f64 {
    HomodyneModel::new(probe, config).pdf(x, phi)
}

/// `log p(x; φ)`, evaluated directly in the log domain.
pub fn homodyne_logpdf(x: f64, phi: f64, probe: Probe, config: &ChannelConfig) -> f64 {
    HomodyneModel::new(probe, config).logpdf(x, phi)
}

/// Uniform on [0, 1) with 53 random bits.
fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal by Box–Muller from exactly two uniforms.
fn standard_normal(rng: &mut ChaCha20Rng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Draws `n` outcomes at i.i.d. uniform phases in [0, π).
///
/// Every sample consumes exactly three `u64` draws (phase, then the two
/// Box–Muller uniforms), so a dataset is reproducible from its seed alone.
pub fn sample_dataset(
    probe: Probe,
    config: &ChannelConfig,
    n: usize,
    seed: u64,
) -> Result<Dataset, HomodyneError> {
    if n == 0 {
        return Err(HomodyneError::EmptyDataset);
    }
    let model = HomodyneModel::new(probe, config);
    let sd = model.variance().sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let phase = PI * uniform(&mut rng);
            // rounding can land exactly on π
            let phase = if phase >= PI { 0.0 } else { phase };
            let value = model.mean(phase) + sd * standard_normal(&mut rng);
            QuadratureSample { phase, value }
        })
        .collect();
    Ok(Dataset {
        samples,
        setup: Setup::from_config(probe, config),
        seed,
        generator: GENERATOR_NAME.to_string(),
    })
}

/// Draws `n` outcomes at a single fixed phase.
pub fn sample_at_phase(
    probe: Probe,
    config: &ChannelConfig,
    phi: f64,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let model = HomodyneModel::new(probe, config);
    let sd = model.variance().sqrt();
    let mean = model.mean(phi);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| mean + sd * standard_normal(&mut rng))
        .collect()
}

/// Homodyne density obtained numerically: the output Wigner function rotated
/// by `φ` is integrated over the conjugate quadrature, then smeared by the
/// detector-efficiency Gaussian. Used as an independent check on
/// [`homodyne_pdf`].
pub fn wigner_marginal_numeric(
    probe: Probe,
    channel: &DerivedChannel,
    eta: f64,
    phi: f64,
    x: f64,
) -> Result<f64, HomodyneError> {
    check_eta(eta)?;
    let rule = GaussLegendre::new(ORACLE_NODES);
    if eta == 1.0 {
        return line_marginal(&rule, probe, channel, phi, x);
    }

    // efficiency adds (1−η)/(2η) to s², i.e. (1−η)/(4η) to the quadrature variance
    let var = efficiency_noise(eta) / 2.0;
    let half = ORACLE_SIGMAS * var.sqrt();
    let norm = 1.0 / (2.0 * PI * var).sqrt();
    let mut failure = None;
    let est = integrate_refined(
        &rule,
        |xp| {
            let m = match line_marginal(&rule, probe, channel, phi, xp) {
                Ok(m) => m,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            let d = x - xp;
            m * norm * (-d * d / (2.0 * var)).exp()
        },
        x - half,
        x + half,
        ORACLE_REFINE_TOL,
        ORACLE_MAX_LEVELS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    check_converged(est.error)?;
    Ok(est.value)
}

/// `∫ W(α e^{iφ}) d Im(α)` at `Re(α) = x`, no detector noise.
fn line_marginal(
    rule: &GaussLegendre,
    probe: Probe,
    channel: &DerivedChannel,
    phi: f64,
    x: f64,
) -> Result<f64, HomodyneError> {
    let (cs, sn) = (phi.cos(), phi.sin());
    // centre of the rotated Gaussian along the integration line
    let (_, centre_im) = probe.rotated(phi);
    let centre = channel.g * centre_im;
    let half = ORACLE_SIGMAS * (channel.s_sq / 2.0).sqrt();
    let est = integrate_refined(
        rule,
        |y| {
            // α e^{iφ} with α = x + iy
            let re = x * cs - y * sn;
            let im = x * sn + y * cs;
            crate::channel::output_wigner(probe, channel, re, im)
        },
        centre - half,
        centre + half,
        ORACLE_REFINE_TOL,
        ORACLE_MAX_LEVELS,
    );
    check_converged(est.error)?;
    Ok(est.value)
}

fn check_converged(error: f64) -> Result<(), HomodyneError> {
    if error > ORACLE_FAIL_TOL {
        return Err(HomodyneError::QuadratureNonConvergence {
            estimate: error,
            tolerance: ORACLE_FAIL_TOL,
        });
    }
    Ok(())
}
