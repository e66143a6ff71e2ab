//! Maximum-likelihood characterization of linear absorbing/amplifying optical
//! media from random-phase homodyne detection of a coherent probe.
//!
//! The pieces, bottom up:
//!
//! * [`channel`]: closed-form Gaussian channel (`g`, `δ²`, output Wigner function).
//! * [`homodyne`]: homodyne density, seeded sampler, numeric Wigner-marginal check.
//! * [`estimator`]: log-likelihood, moment initializer, simplex ML fit, Fisher errors.
//! * [`harness`]: Monte Carlo ensembles over G2, N or η, and power-law fits.
//! * [`io`] and [`cli`]: file formats and the `homodyne-ml` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod homodyne;
pub mod io;
pub mod quadrature;

pub use channel::{
    derive_channel, gains_from_atoms, invert_channel, output_wigner, propagation_gain,
    ChannelConfig, DerivedChannel, Gains, Inversion, Probe,
};
pub use error::{ChannelError, DataError, EstimatorError, HarnessError, HomodyneError};
pub use estimator::{
    fisher_errors, grid_search_oracle, log_likelihood, mle_fit, moment_init, FitOptions, FitResult,
};
pub use homodyne::{
    homodyne_logpdf, homodyne_pdf, sample_dataset, total_variance_param, wigner_marginal_numeric,
    Dataset, QuadratureSample, Setup,
};
