use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("gains must be non-negative, got G1={g1}, G2={g2}")]
    NegativeGain { g1: f64, g2: f64 },
    #[error("interaction time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("quantum efficiency must lie in (0, 1], got {0}")]
    InvalidEfficiency(f64),
    #[error("rate constant must be positive, got {0}")]
    InvalidRate(f64),
    #[error("invalid moment {0}={1}")]
    InvalidMoment(&'static str, f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomodyneError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("sample count must be at least 1")]
    EmptyDataset,
    #[error("quadrature did not converge: error estimate {estimate:e} exceeds {tolerance:e}")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("degenerate dataset: {0} samples is too few to fit")]
    DegenerateDataset(usize),
    #[error("invalid fit options: {0}")]
    InvalidOptions(&'static str),
    #[error("information matrix is not positive definite")]
    NonInvertibleInformation,
    #[error("estimate G1={g1}, G2={g2} lies too close to the boundary for finite differences")]
    BoundaryEstimate { g1: f64, g2: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing metadata key `{0}`")]
    MissingKey(&'static str),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Homodyne(#[from] HomodyneError),
    #[error("{failed} of {total} trials failed at sweep value {sweep_value}")]
    TooManyFailures {
        sweep_value: f64,
        failed: usize,
        total: usize,
    },
    #[error("power-law fit: {0}")]
    PowerLaw(&'static str),
}
