use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(u64),
    #[error("unsupported dimension {0}: construction needs an odd prime")]
    UnsupportedDimension(u64),
    #[error("index {index} out of range (max {max})")]
    InvalidIndex { index: u64, max: u64 },
    #[error("precision {0} outside [0, 1]")]
    InvalidPrecision(f64),
    #[error("sharpness {0} outside [0, 1]")]
    InvalidSharpness(f64),
    #[error("quality factor {0} outside [0, 1] or violates F^2 + G^2 <= 1")]
    InvalidQuality(f64),
    #[error("isotropic weight {0} outside [0, 1]")]
    InvalidWeight(f64),
    #[error("custom pointer requires a quality curve")]
    MissingCurve,
    #[error("invalid quality curve: {0}")]
    Curve(String),
    #[error("precision {g} outside tabulated curve domain [{lo}, {hi}]")]
    CurveDomain { g: f64, lo: f64, hi: f64 },
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("operation not supported for scenario {0}")]
    UnsupportedScenario(String),
    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
