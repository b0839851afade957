use thiserror::Error;

/// Errors raised while validating interpolation data, signatures and
/// scaling families.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("knots must be strictly increasing: x[{index}] = {value} does not exceed x[{index}-1]")]
    NonIncreasingKnots { index: usize, value: f64 },
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("non-finite value in {what} at index {index}")]
    NonFiniteValue { what: &'static str, index: usize },
    #[error("need at least 3 knots, got {0}")]
    TooFewKnots(usize),
    #[error("signature entries must be 0 or 1, got {value} at index {index}")]
    BadSignature { index: usize, value: u8 },
    #[error(
        "contraction violated on interval {interval}: {which} norm sum {sum} must stay below 1"
    )]
    ContractionViolation {
        interval: usize,
        which: &'static str,
        sum: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("envelope denominator non-positive on interval {interval}: {value}")]
    DegenerateDenominator { interval: usize, value: f64 },
    #[error("abscissa {x} outside [{lo}, {hi}]")]
    XOutOfDomain { x: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("refinement to depth {depth} needs {points} points, above the cap {cap}")]
    DepthTooLarge { depth: u32, points: u128, cap: u64 },
    #[error("need at least 2 sample abscissae, got {0}")]
    TooFewSamples(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("shape constraint violated: {0}")]
    SpecViolation(String),
    #[error("denominator collapse: {0}")]
    DenominatorCollapse(String),
    #[error("omega = {omega} must satisfy sbar < omega < 1 (sbar = {sbar})")]
    BadOmega { omega: f64, sbar: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("knot x = {0} not found in the sample")]
    MissingKnot(f64),
    #[error("sample is empty")]
    EmptySample,
}

/// Errors raised while loading a run configuration (TOML + data CSV).
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Csv {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
