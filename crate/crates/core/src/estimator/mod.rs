//! Maximum-likelihood estimation of `(G1, G2)` from a homodyne record.
//!
//! The likelihood depends on the gains only through the amplitude factor `g`
//! and the detected variance parameter `s²`. The fit maximizes it with a
//! Nelder–Mead simplex in `log(G + ε)` coordinates, starting from a
//! method-of-moments guess, and attaches error bars from the observed Fisher
//! information.

mod simplex;

use crate::channel::{invert_channel, Gains, Inversion};
use crate::error::EstimatorError;
use crate::homodyne::{Dataset, HomodyneModel};

use simplex::SimplexOptions;

/// Floor inside the log transform so a zero gain maps to a finite coordinate.
pub const LOG_FLOOR: f64 = 1e-12;

/// Relative finite-difference step for the information matrix.
pub const FD_STEP: f64 = 1e-4;

/// Multiplicative jitter applied to the moment estimate for restarts.
const RESTART_JITTER: [(f64, f64); 4] = [(1.2, 0.8), (0.8, 1.2), (1.2, 1.2), (0.8, 0.8)];

/// Smallest gain used to place the initial simplex when a start sits on the
/// boundary.
const SIMPLEX_FLOOR: f64 = 0.05;
const SIMPLEX_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub tol_loglik: f64,
    pub tol_param: f64,
    pub max_iters: usize,
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol_loglik: 1e-8,
            tol_param: 1e-6,
            max_iters: 2000,
            restarts: 3,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if !(self.tol_loglik > 0.0) || !(self.tol_param > 0.0) {
            return Err(EstimatorError::InvalidOptions(
                "tolerances must be positive",
            ));
        }
        if self.max_iters == 0 {
            return Err(EstimatorError::InvalidOptions(
                "max_iters must be at least 1",
            ));
        }
        Ok(())
    }
}

/// Why the error bars of a fit are infinite, if they are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorStatus {
    Ok,
    BoundaryEstimate,
    NonInvertible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub gains_hat: Gains,
    /// (δG1, δG2); infinite when `err_status` is not `Ok`.
    pub err: (f64, f64),
    pub err_status: ErrorStatus,
    pub loglik: f64,
    pub converged: bool,
    /// Simplex iterations spent on the winning start.
    pub iters: usize,
    pub init: Gains,
    /// Estimate sits on the G1 = 0 / G2 = 0 boundary.
    pub clamped: (bool, bool),
    /// Seed of the dataset that was fitted.
    pub seed: u64,
}

/// Precomputed per-sample terms for repeated likelihood evaluation.
#[derive(Debug, Clone)]
pub struct LogLikelihood<'a> {
    dataset: &'a Dataset,
    values: Vec<f64>,
    projections: Vec<f64>,
}

impl<'a> LogLikelihood<'a> {
    pub fn new(dataset: &'a Dataset) -> Self {
        let probe = dataset.setup.probe;
        let (values, projections) = dataset
            .samples
            .iter()
            .map(|s| (s.value, probe.projection(s.phase)))
            .unzip();
        LogLikelihood {
            dataset,
            values,
            projections,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn model(&self, gains: Gains) -> HomodyneModel {
        let setup = &self.dataset.setup;
        let ch = crate::channel::derive_channel(gains, setup.time);
        let s_sq = ch.s_sq + (1.0 - setup.eta) / (2.0 * setup.eta);
        HomodyneModel::from_moments(setup.probe, ch.g, s_sq)
    }

    pub fn eval(&self, gains: Gains) -> f64 {
        let m = self.model(gains);
        self.eval_moments(m.g(), m.s_sq())
    }

    /// Log-likelihood as a function of `(g, s²)`.
    pub fn eval_moments(&self, g: f64, s_sq: f64) -> f64 {
        let n = self.values.len() as f64;
        let sq = pairwise_sum(self.values.len(), &|k| {
            let d = self.values[k] - g * self.projections[k];
            d * d
        });
        -0.5 * n * (std::f64::consts::PI * s_sq).ln() - sq / s_sq
    }
}

const PAIRWISE_BLOCK: usize = 64;

/// Fixed-order pairwise summation of `term(0..n)`.
fn pairwise_sum(n: usize, term: &dyn Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, term: &dyn Fn(usize) -> f64) -> f64 {
        if hi - lo <= PAIRWISE_BLOCK {
            (lo..hi).map(term).sum()
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, n, term)
}

/// `Σ_k log p(x_k | G1, G2)` over the dataset.
pub fn log_likelihood(dataset: &Dataset, gains: Gains) -> f64 {
    LogLikelihood::new(dataset).eval(gains)
}

/// Method-of-moments starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentInit {
    pub gains: Gains,
    pub g_hat: f64,
    pub s_sq_hat: f64,
    /// `|α0|` too small to identify `g` from the mean; `g = 1` was used.
    pub probe_too_weak: bool,
    /// Regression gave `g ≤ 0`; `g = 1` was used.
    pub g_fallback: bool,
    pub inversion: Inversion,
}

const WEAK_PROBE: f64 = 1e-6;
const MIN_MOMENT_SAMPLES: usize = 10;

/// Regresses `x_k` on `(cos φ_k, sin φ_k)`, reads `g` off the fitted
/// coefficients using the known `α0`, takes `s²` from the residual variance,
/// and inverts `(g, s²)` to gains.
pub fn moment_init(dataset: &Dataset) -> Result<MomentInit, EstimatorError> {
    if dataset.len() < MIN_MOMENT_SAMPLES {
        return Err(EstimatorError::DegenerateDataset(dataset.len()));
    }
    moments(dataset)
}

fn moments(dataset: &Dataset) -> Result<MomentInit, EstimatorError> {
    let probe = dataset.setup.probe;
    let n = dataset.len();
    let (mut scc, mut scs, mut sss, mut sxc, mut sxs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in &dataset.samples {
        let (sn, cs) = s.phase.sin_cos();
        scc += cs * cs;
        scs += cs * sn;
        sss += sn * sn;
        sxc += s.value * cs;
        sxs += s.value * sn;
    }
    let det = scc * sss - scs * scs;
    let (bc, bs, dof) = if det > 1e-12 * (scc * sss).max(f64::MIN_POSITIVE) {
        (
            (sss * sxc - scs * sxs) / det,
            (scc * sxs - scs * sxc) / det,
            n.saturating_sub(2),
        )
    } else {
        // all phases (nearly) equal: one regressor along the probe direction
        let (mut smm, mut sxm) = (0.0, 0.0);
        for s in &dataset.samples {
            let m = probe.projection(s.phase);
            smm += m * m;
            sxm += s.value * m;
        }
        let gm = if smm > 0.0 { sxm / smm } else { 0.0 };
        (gm * probe.re(), gm * probe.im(), n.saturating_sub(1))
    };
    let resid: f64 = dataset
        .samples
        .iter()
        .map(|s| {
            let (sn, cs) = s.phase.sin_cos();
            let d = s.value - bc * cs - bs * sn;
            d * d
        })
        .sum();
    let var = resid / dof.max(1) as f64;
    let s_sq_hat = 2.0 * var;

    let amp_sq = probe.re() * probe.re() + probe.im() * probe.im();
    let probe_too_weak = probe.modulus() < WEAK_PROBE;
    let mut g_fallback = false;
    let g_hat = if probe_too_weak {
        1.0
    } else {
        let g = (bc * probe.re() + bs * probe.im()) / amp_sq;
        if g > 0.0 && g.is_finite() {
            g
        } else {
            g_fallback = true;
            1.0
        }
    };
    let inversion = invert_channel(g_hat, s_sq_hat, dataset.setup.time, dataset.setup.eta)?;
    Ok(MomentInit {
        gains: inversion.gains,
        g_hat,
        s_sq_hat,
        probe_too_weak,
        g_fallback,
        inversion,
    })
}

fn to_coord(g: f64) -> f64 {
    (g + LOG_FLOOR).ln()
}

fn from_coord(u: f64) -> f64 {
    (u.exp() - LOG_FLOOR).max(0.0)
}

const BOUNDARY: f64 = 1e-9;

/// Maximum-likelihood fit of `(G1, G2)`.
pub fn mle_fit(dataset: &Dataset, options: &FitOptions) -> Result<FitResult, EstimatorError> {
    options.validate()?;
    if dataset.len() < 4 {
        return Err(EstimatorError::DegenerateDataset(dataset.len()));
    }
    let objective = LogLikelihood::new(dataset);
    let init = moments(dataset)?.gains;

    let mut starts = vec![init];
    for r in 0..options.restarts {
        let (a, b) = RESTART_JITTER[r % RESTART_JITTER.len()];
        starts.push(Gains::new(init.g1() * a, init.g2() * b)?);
    }

    let opts = SimplexOptions {
        f_tol: options.tol_loglik,
        x_tol: options.tol_param,
        max_iters: options.max_iters,
    };
    let mut best: Option<simplex::SimplexResult<2>> = None;
    for start in &starts {
        let u0 = [to_coord(start.g1()), to_coord(start.g2())];
        let steps = [simplex_step(start.g1()), simplex_step(start.g2())];
        let run = simplex::minimize(
            |u: &[f64; 2]| match Gains::new(from_coord(u[0]), from_coord(u[1])) {
                Ok(g) => -objective.eval(g),
                Err(_) => f64::INFINITY,
            },
            u0,
            steps,
            opts,
        );
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let gains_hat = Gains::new(from_coord(best.x[0]), from_coord(best.x[1]))?;

    let (err, err_status) = match fisher_errors(dataset, gains_hat) {
        Ok(e) => (e, ErrorStatus::Ok),
        Err(EstimatorError::BoundaryEstimate { .. }) => (
            (f64::INFINITY, f64::INFINITY),
            ErrorStatus::BoundaryEstimate,
        ),
        Err(EstimatorError::NonInvertibleInformation) => {
            ((f64::INFINITY, f64::INFINITY), ErrorStatus::NonInvertible)
        }
        Err(e) => return Err(e),
    };

    Ok(FitResult {
        gains_hat,
        err,
        err_status,
        loglik: -best.f,
        converged: best.converged,
        iters: best.iters,
        init,
        clamped: (gains_hat.g1() < BOUNDARY, gains_hat.g2() < BOUNDARY),
        seed: dataset.seed,
    })
}

/// Log-coordinate offset of the second simplex vertex along one axis.
fn simplex_step(g: f64) -> f64 {
    if g < SIMPLEX_FLOOR {
        to_coord(SIMPLEX_FLOOR) - to_coord(g)
    } else {
        SIMPLEX_STEP
    }
}

/// Observed information `−∂²L/∂G_i∂G_j` by central differences with steps
/// `step_scale · max(1, G_i)`.
pub fn observed_information(
    dataset: &Dataset,
    gains: Gains,
    step_scale: f64,
) -> Result<[[f64; 2]; 2], EstimatorError> {
    let objective = LogLikelihood::new(dataset);
    let (x1, x2) = (gains.g1(), gains.g2());
    let h1 = step_scale * x1.max(1.0);
    let h2 = step_scale * x2.max(1.0);
    if x1 <= 10.0 * h1 || x2 <= 10.0 * h2 {
        return Err(EstimatorError::BoundaryEstimate { g1: x1, g2: x2 });
    }
    let l =
        |a: f64, b: f64| -> Result<f64, EstimatorError> { Ok(objective.eval(Gains::new(a, b)?)) };
    let l0 = l(x1, x2)?;
    let d11 = (l(x1 + h1, x2)? - 2.0 * l0 + l(x1 - h1, x2)?) / (h1 * h1);
    let d22 = (l(x1, x2 + h2)? - 2.0 * l0 + l(x1, x2 - h2)?) / (h2 * h2);
    let d12 = (l(x1 + h1, x2 + h2)? - l(x1 + h1, x2 - h2)? - l(x1 - h1, x2 + h2)?
        + l(x1 - h1, x2 - h2)?)
        / (4.0 * h1 * h2);
    Ok([[-d11, -d12], [-d12, -d22]])
}

/// `(δG1, δG2)`: square roots of the diagonal of the inverse observed
/// information at `gains_hat`.
pub fn fisher_errors(dataset: &Dataset, gains_hat: Gains) -> Result<(f64, f64), EstimatorError> {
    let info = observed_information(dataset, gains_hat, FD_STEP)?;
    let [[a, b], [_, d]] = info;
    let det = a * d - b * b;
    if !(a > 0.0 && d > 0.0 && det > 0.0) || !det.is_finite() {
        return Err(EstimatorError::NonInvertibleInformation);
    }
    Ok(((d / det).sqrt(), (a / det).sqrt()))
}

/// Exhaustive argmax of the log-likelihood on a `steps × steps` grid spanning
/// `[lo, hi]`. Ties go to the smaller G1, then the smaller G2.
pub fn grid_search_oracle(
    dataset: &Dataset,
    lo: Gains,
    hi: Gains,
    steps: usize,
) -> Result<Gains, EstimatorError> {
    if steps < 2 {
        return Err(EstimatorError::InvalidGrid("steps must be at least 2"));
    }
    if !(lo.g1() < hi.g1() && lo.g2() < hi.g2()) {
        return Err(EstimatorError::InvalidGrid(
            "lo must be below hi in both components",
        ));
    }
    let objective = LogLikelihood::new(dataset);
    let node = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (steps - 1) as f64;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..steps {
        let g1 = node(lo.g1(), hi.g1(), i);
        for j in 0..steps {
            let g2 = node(lo.g2(), hi.g2(), j);
            let gains = Gains::new(g1, g2)?;
            let v = objective.eval(gains);
            if v > best.0 {
                best = (v, gains);
            }
        }
    }
    Ok(best.1)
}
