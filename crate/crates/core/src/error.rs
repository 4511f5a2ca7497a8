use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("t = {t} lies outside the signal span [{lo}, {hi}]")]
    SpanViolation { t: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resolution guard violated: {intervals} grid intervals for {modes} modes (need at least {required})")]
    ResolutionGuard {
        modes: usize,
        intervals: usize,
        required: usize,
    },

    #[error("field belongs to a different basis")]
    BasisMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("boundary value {value} violates the Dirichlet condition")]
    NotDirichlet { value: f64 },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("step map is not a contraction: factor {factor} >= 1/2 at dt = {dt}, radius {radius}")]
    NonContraction { factor: f64, dt: f64, radius: f64 },

    #[error("Picard iteration did not reach tolerance within {iterations} iterations (last increment {increment})")]
    PicardStalled { iterations: u32, increment: f64 },

    #[error("forcing quadrature needs {panels} panels in one step (cap {cap})")]
    SubdivisionOverflow { panels: usize, cap: usize },

    #[error("trajectories do not share time stamps")]
    StampMismatch,

    #[error("energy trace is not constant: deviation {deviation} exceeds {tolerance}")]
    EnergyNotConstant { deviation: f64, tolerance: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("trajectory covers [{start}, {end}] but [{needed_start}, {needed_end}] is required")]
    SpanTooShort {
        start: f64,
        end: f64,
        needed_start: f64,
        needed_end: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
