use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Inconsistent or unsupported configuration.
    Config(String),
    /// Two objects that must share a dimension do not.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// `v.v` vanished where the anomalous spin law divides by it.
    DegenerateVelocity { s: f64 },
    /// A derivative or state component became non-finite or exceeded the blowup bound.
    Blowup { s: f64 },
    /// Adaptive control could not meet the tolerance before the step underflowed.
    StepUnderflow { s: f64, h: f64 },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch in {what}: expected {expected}, found {found}"
            ),
            Error::DegenerateVelocity { s } => {
                write!(f, "degenerate velocity (v.v = 0) at s = {s}")
            }
            Error::Blowup { s } => write!(f, "numerical blowup at s = {s}"),
            Error::StepUnderflow { s, h } => {
                write!(f, "adaptive step underflow at s = {s} (h = {h:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
