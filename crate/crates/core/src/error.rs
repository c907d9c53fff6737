use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` must be positive, got {value}")]
    NonPositiveValue { key: String, value: f64 },
    #[error("`{key}` must be finite")]
    NonFiniteValue { key: String },
    #[error("grid needs {requested} points, cap is {cap}")]
    GridOverflow { requested: usize, cap: usize },
    #[error("grid too narrow: {tail_mass:.3e} of the state lies outside the grid")]
    GridTooNarrow { tail_mass: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("chirp rate {chirp_rate} does not match k0*g = {expected}")]
    ChirpMismatch { chirp_rate: f64, expected: f64 },
    #[error("momentum kick pushes {lost_mass:.3e} of the state off the grid")]
    KickOffGrid { lost_mass: f64 },
    #[error("rotation angle {0} outside (0, pi)")]
    ThetaOutOfRange(f64),
    #[error("aliasing detected: {guard_mass:.3e} of the state in the guard band")]
    AliasingDetected { guard_mass: f64 },
    #[error("integrator could not meet tolerance at p = {p} (reached t = {reached})")]
    ToleranceNotMet { p: f64, reached: f64 },
    #[error("detuning is not finite at t = {0}")]
    NonFiniteDetuning(f64),
    #[error("Gauss decomposition singular at index {index}: |U_bb| = {magnitude:.3e}")]
    GaussSingular { index: usize, magnitude: f64 },
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("length {0} is not a power of two")]
    NonPowerOfTwo(usize),
    #[error("{what} did not converge: estimate {estimate}, spread {spread:.3e}")]
    NoConvergence {
        what: String,
        estimate: f64,
        spread: f64,
    },
    #[error("objective is flat over the search range")]
    FlatObjective,
    #[error("retained probability mass {retained} below 1 - 1e-6")]
    DegenerateDistribution { retained: f64 },
    #[error("sweep axis `{0}` is empty")]
    AxisEmpty(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("job {index} failed: {source}")]
    JobFailed { index: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingKey(_) => "MissingKey",
            Error::UnknownKey(_) => "UnknownKey",
            Error::NonPositiveValue { .. } => "NonPositiveValue",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::GridOverflow { .. } => "GridOverflow",
            Error::GridTooNarrow { .. } => "GridTooNarrow",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::ChirpMismatch { .. } => "ChirpMismatch",
            Error::KickOffGrid { .. } => "KickOffGrid",
            Error::ThetaOutOfRange(_) => "ThetaOutOfRange",
            Error::AliasingDetected { .. } => "AliasingDetected",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::NonFiniteDetuning(_) => "NonFiniteDetuning",
            Error::GaussSingular { .. } => "GaussSingular",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::NonPowerOfTwo(_) => "NonPowerOfTwo",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::FlatObjective => "FlatObjective",
            Error::DegenerateDistribution { .. } => "DegenerateDistribution",
            Error::AxisEmpty(_) => "AxisEmpty",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::JobFailed { .. } => "JobFailed",
        }
    }
}
