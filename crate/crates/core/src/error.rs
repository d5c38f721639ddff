use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("proper time {tau} outside the worldline range [{min}, {max}]")]
    OutOfRange { tau: f64, min: f64, max: f64 },

    #[error("worldline is not timelike at t = {t} (speed {speed})")]
    Superluminal { t: f64, speed: f64 },

    #[error("sampled worldline row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("sampled worldline: t is not strictly increasing at row {row}")]
    NonMonotone { row: usize },

    #[error("sampled worldline: segment {segment} is superluminal (speed {speed})")]
    SuperluminalSegment { segment: usize, speed: f64 },

    #[error("sampled worldline needs at least 4 rows, got {rows}")]
    TooFewRows { rows: usize },

    #[error("degenerate Wightman kernel at (tau1, tau2) = ({tau1}, {tau2}): |s.s| = {magnitude:e}")]
    DegenerateKernel { tau1: f64, tau2: f64, magnitude: f64 },

    #[error("kernel is not Hermitian at ({tau1}, {tau2}): relative deviation {deviation:e}")]
    NonHermitian { tau1: f64, tau2: f64, deviation: f64 },

    #[error("integral has imaginary part {imag:e} beyond tolerance at T = {t}")]
    ImaginaryResidual { t: f64, imag: f64 },

    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical invariant, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateKernel { .. }
                | Error::NonHermitian { .. }
                | Error::ImaginaryResidual { .. }
                | Error::Consistency(_)
                | Error::Domain(_)
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
