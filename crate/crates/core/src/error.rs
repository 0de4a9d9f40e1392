//! Error type shared by the whole crate.

use core::fmt;

/// Errors raised by prior construction, calibration and the Monte-Carlo
/// machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A prior shape does not integrate to one within tolerance.
    InvalidShape { integral: f64 },
    /// No finite truncation index found within the iteration cap.
    DivergentTail,
    /// Adaptive quadrature did not converge.
    QuadratureNonConvergence,
    /// The entropy integral did not converge.
    EntropyDivergence,
    /// Observation length does not match the prior truncation support.
    DimensionMismatch { expected: usize, got: usize },
    /// A parameter is outside the domain of the formula being evaluated.
    Domain(&'static str),
    /// Too few samples to read a stable quantile at the requested level.
    UnstableQuantile { needed: u64, got: u64 },
    /// Combination weights are not a probability vector.
    InvalidWeights,
    /// A tail grid point lies beyond the sampled range.
    InsufficientTail { x: f64 },
    /// The requested channel carries prior weight too heavy for a real-valued
    /// boundary amplitude (the radicand is negative).
    InsideBulk { channel: u32 },
    /// The requested channel is not in the prior's positive-weight support.
    ZeroWeightChannel { channel: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidShape { integral } => {
                write!(f, "prior shape integrates to {integral}, not 1")
            }
            Error::DivergentTail => write!(f, "no finite truncation index within iteration cap"),
            Error::QuadratureNonConvergence => write!(f, "adaptive quadrature did not converge"),
            Error::EntropyDivergence => write!(f, "entropy integral did not converge"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "observation length {got} does not match truncation support {expected}")
            }
            Error::Domain(what) => write!(f, "parameter outside formula domain: {what}"),
            Error::UnstableQuantile { needed, got } => {
                write!(f, "unstable quantile: need at least {needed} samples, have {got}")
            }
            Error::InvalidWeights => write!(f, "weights are not a probability vector"),
            Error::InsufficientTail { x } => {
                write!(f, "tail grid point {x} beyond the sampled range")
            }
            Error::InsideBulk { channel } => {
                write!(f, "channel {channel}: prior weight too heavy for a boundary amplitude")
            }
            Error::ZeroWeightChannel { channel } => {
                write!(f, "channel {channel} carries zero prior weight")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
