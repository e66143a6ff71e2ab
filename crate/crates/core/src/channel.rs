//! Closed-form Gaussian description of a linear absorbing/amplifying medium.
//!
//! A coherent probe `α0` sent through the medium for an effective time `t`
//! leaves as a Gaussian state centred at `g·α0` with Wigner width
//! `δ² + g²/2`, where
//!
//! ```text
//! Q  = (G1 − G2) / 2
//! g  = exp(−Q t)
//! δ² = (G1 + G2)(1 − g²) / (4Q)        → (G1 + G2) t / 2   as Q → 0
//! ```
//!
//! Quadrature convention: `x = Re(α)`, so a coherent state has quadrature
//! variance 1/4. Other homodyne conventions differ from this one by a factor
//! of two in the variance.

use std::f64::consts::PI;

use crate::error::ChannelError;

/// Below this value of `|Q t|` the noise kernel is evaluated from its Taylor
/// series instead of the closed form.
pub const SERIES_SWITCH: f64 = 1e-6;

/// Absorption (`g1`) and amplification (`g2`) rates of the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    g1: f64,
    g2: f64,
}

impl Gains {
    pub fn new(g1: f64, g2: f64) -> Result<Self, ChannelError> {
        if !g1.is_finite() || !g2.is_finite() {
            return Err(ChannelError::NonFinite("gains"));
        }
        if g1 < 0.0 || g2 < 0.0 {
            return Err(ChannelError::NegativeGain { g1, g2 });
        }
        Ok(Gains { g1, g2 })
    }

    /// Absorption rate G1.
    pub fn g1(&self) -> f64 {
        self.g1
    }

    /// Amplification rate G2.
    pub fn g2(&self) -> f64 {
        self.g2
    }
}

/// Coherent input amplitude `α0 = alpha_re + i·alpha_im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    re: f64,
    im: f64,
}

impl Probe {
    pub fn new(re: f64, im: f64) -> Result<Self, ChannelError> {
        if !re.is_finite() || !im.is_finite() {
            return Err(ChannelError::NonFinite("probe amplitude"));
        }
        Ok(Probe { re, im })
    }

    /// A probe with real amplitude.
    pub fn real(amplitude: f64) -> Result<Self, ChannelError> {
        Probe::new(amplitude, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// `Re(α0 e^{−iφ})`, the quadrature of the probe seen at phase `phi`.
    pub fn projection(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.re * c + self.im * s
    }

    /// `α0 e^{−iφ}` as (re, im).
    pub fn rotated(&self, phi: f64) -> (f64, f64) {
        let (s, c) = phi.sin_cos();
        (self.re * c + self.im * s, self.im * c - self.re * s)
    }
}

/// Gains together with the known interaction time and detector efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    gains: Gains,
    time: f64,
    eta: f64,
}

impl ChannelConfig {
    pub fn new(gains: Gains, time: f64, eta: f64) -> Result<Self, ChannelError> {
        check_time(time)?;
        check_eta(eta)?;
        Ok(ChannelConfig { gains, time, eta })
    }

    pub fn gains(&self) -> Gains {
        self.gains
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn with_gains(&self, gains: Gains) -> Self {
        ChannelConfig { gains, ..*self }
    }

    pub fn derive(&self) -> DerivedChannel {
        derive_channel(self.gains, self.time)
    }
}

pub(crate) fn check_time(time: f64) -> Result<(), ChannelError> {
    if !time.is_finite() || time < 0.0 {
        return Err(ChannelError::InvalidTime(time));
    }
    Ok(())
}

pub(crate) fn check_eta(eta: f64) -> Result<(), ChannelError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(ChannelError::InvalidEfficiency(eta));
    }
    Ok(())
}

/// Analytic channel descriptors for fixed gains and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedChannel {
    /// Decay rate `Q = (G1 − G2)/2`; positive means net absorption.
    pub q: f64,
    /// Amplitude factor `g = e^{−Qt}`.
    pub g: f64,
    /// Added noise variance `δ²`.
    pub delta_sq: f64,
    /// `δ² + g²/2`, the Wigner width before detection.
    pub s_sq: f64,
    /// Intensity gain `e^{(G2−G1)t}`.
    pub gain_factor: f64,
}

/// `(1 − e^{−2Qt}) / (4Q)`, with the Taylor form near `Q t = 0`.
fn noise_kernel(q: f64, time: f64) -> f64 {
    let x = q * time;
    if x.abs() < SERIES_SWITCH {
        0.5 * time * (1.0 - x + 2.0 / 3.0 * x * x)
    } else {
        -(-2.0 * x).exp_m1() / (4.0 * q)
    }
}

pub fn derive_channel(gains: Gains, time: f64) -> DerivedChannel {
    let q = 0.5 * (gains.g1 - gains.g2);
    let g = (-q * time).exp();
    let delta_sq = (gains.g1 + gains.g2) * noise_kernel(q, time);
    DerivedChannel {
        q,
        g,
        delta_sq,
        s_sq: delta_sq + 0.5 * g * g,
        gain_factor: propagation_gain(gains, time),
    }
}

/// Overall intensity (de)amplification `exp((G2 − G1) t)`.
pub fn propagation_gain(gains: Gains, time: f64) -> f64 {
    ((gains.g2 - gains.g1) * time).exp()
}

/// Gains from atomic level populations: `G1 = γ N1`, `G2 = γ N2`.
pub fn gains_from_atoms(gamma: f64, n1: f64, n2: f64) -> Result<Gains, ChannelError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(ChannelError::InvalidRate(gamma));
    }
    Gains::new(gamma * n1, gamma * n2)
}

/// Output Wigner function `W(α, α*; t)` of a coherent probe at the phase-space
/// point `re + i·im`.
pub fn output_wigner(probe: Probe, channel: &DerivedChannel, re: f64, im: f64) -> f64 {
    let dr = re - channel.g * probe.re;
    let di = im - channel.g * probe.im;
    (-(dr * dr + di * di) / channel.s_sq).exp() / (PI * channel.s_sq)
}

/// Result of inverting observed `(g, s²)` moments back to gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub gains: Gains,
    /// The implied `δ²` was negative and has been set to zero.
    pub delta_clamped: bool,
    pub g1_clamped: bool,
    pub g2_clamped: bool,
}

impl Inversion {
    pub fn any_clamped(&self) -> bool {
        self.delta_clamped || self.g1_clamped || self.g2_clamped
    }
}

/// Inverts `g_obs` and the detected variance parameter `s_sq_obs`
/// (`δ² + g²/2 + (1−η)/(2η)`) to gains. Non-physical moments are clamped to
/// the boundary and flagged rather than rejected.
pub fn invert_channel(
    g_obs: f64,
    s_sq_obs: f64,
    time: f64,
    eta: f64,
) -> Result<Inversion, ChannelError> {
    if !(g_obs > 0.0) || !g_obs.is_finite() {
        return Err(ChannelError::InvalidMoment("g_obs", g_obs));
    }
    if !s_sq_obs.is_finite() {
        return Err(ChannelError::InvalidMoment("s_sq_obs", s_sq_obs));
    }
    if !(time > 0.0) || !time.is_finite() {
        return Err(ChannelError::InvalidTime(time));
    }
    check_eta(eta)?;

    let q = -g_obs.ln() / time;
    let mut delta_sq = s_sq_obs - 0.5 * g_obs * g_obs - (1.0 - eta) / (2.0 * eta);
    let delta_clamped = delta_sq < 0.0;
    if delta_clamped {
        delta_sq = 0.0;
    }
    let sum = delta_sq / noise_kernel(q, time);
    let diff = 2.0 * q;
    let mut g1 = 0.5 * (sum + diff);
    let mut g2 = 0.5 * (sum - diff);
    let g1_clamped = g1 < 0.0;
    let g2_clamped = g2 < 0.0;
    if g1_clamped {
        g1 = 0.0;
    }
    if g2_clamped {
        g2 = 0.0;
    }
    Ok(Inversion {
        gains: Gains::new(g1, g2)?,
        delta_clamped,
        g1_clamped,
        g2_clamped,
    })
}
