use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// Variants are split between configuration problems (bad input, violated
/// preconditions) and mathematical failures (non-convergence, an assumption on
/// the potential that turns out not to hold). The CLI maps the first group to
/// exit code 1 and the second to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no single-band solution found: {0}")]
    NoSingleBand(String),

    #[error("non-regular potential: {0}")]
    NonRegular(String),

    #[error("not single-band: {0}")]
    NotSingleBand(String),

    #[error("on branch cut at z = {0}")]
    OnBranchCut(f64),

    #[error("too close to support at z = {0}")]
    TooCloseToSupport(f64),

    #[error("equilibrium inconsistency: {0}")]
    EquilibriumInconsistency(String),

    #[error("b* undefined: a = {a} is not below a_c = {a_c}")]
    BStarUndefined { a: f64, a_c: f64 },

    #[error("P2 has no interior maximum: {0}")]
    NoInteriorMaximum(String),

    #[error("degenerate maximum: curvature {0} is not positive")]
    DegenerateMaximum(f64),

    #[error("outside local chart: {0}")]
    OutsideChart(String),

    #[error("prediction refused: {0}")]
    PredictionRefused(String),

    #[error("series extraction failed: residual {0}")]
    SeriesExtraction(f64),

    #[error("raise precision: {0}")]
    RaisePrecision(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("{0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 1 for usage/config errors, 2 for mathematical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidPotential(_)
            | Error::InvalidArgument(_)
            | Error::Domain(_)
            | Error::PredictionRefused(_)
            | Error::OutsideChart(_)
            | Error::BStarUndefined { .. }
            | Error::Usage(_)
            | Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Usage(format!("json: {e}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
