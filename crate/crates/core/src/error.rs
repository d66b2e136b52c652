use core::fmt;

/// Errors raised by the estimation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coefficient list was empty.
    EmptyCoefficients,
    /// A coefficient or sample was NaN or infinite.
    NonFinite { index: usize },
    /// Leading denominator coefficient is zero.
    ZeroLeadingDenominator,
    /// Numerator degree exceeds denominator degree.
    Improper { num_degree: usize, den_degree: usize },
    /// `1 + C·G` vanishes identically or loses its leading term.
    IllPosedLoop,
    /// Transfer function has a pole at `exp(i·omega)`.
    PoleOnUnitCircle { omega: f64 },
    /// Frequency outside `[0, π]`.
    FrequencyOutOfRange { omega: f64 },
    /// Durand–Kerner iteration did not reach its residual tolerance.
    RootsNotConverged { iterations: usize, residual: f64 },
    /// Norm oracle requested for a system that is not strictly stable.
    Unstable,
    /// Impulse-response tail could not be certified before the length cap.
    TailNotCertified { samples: usize },
    /// Two sequences that must have equal length do not.
    LengthMismatch { expected: usize, found: usize },
    /// Sequence that must be nonempty is empty.
    EmptySequence,
    /// Reference signal has zero empirical variance.
    ZeroVariance,
    /// Non-finite SNR.
    InvalidSnr,
    /// PRBS register length outside the tap table.
    UnsupportedRegisterLength(u32),
    /// A size parameter was out of its allowed range.
    InvalidSize { what: &'static str, value: usize },
    /// Not enough samples for the requested IR length.
    InsufficientData { samples: usize, order: usize },
    /// Hyperparameter outside its domain.
    InvalidHyperparameter { what: &'static str, value: f64 },
    /// Normal equations are numerically singular.
    RankDeficient { condition: f64 },
    /// Cholesky factorization hit a nonpositive pivot.
    NotPositiveDefinite { pivot: usize },
    /// Marginal-likelihood cost was non-finite on the whole grid.
    TuningFailed,
    /// Largest-singular-value iteration did not converge.
    NotConverged { estimate: f64, residual: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyCoefficients => write!(f, "coefficient list is empty"),
            Error::NonFinite { index } => write!(f, "non-finite value at index {index}"),
            Error::ZeroLeadingDenominator => write!(f, "leading denominator coefficient is zero"),
            Error::Improper { num_degree, den_degree } => write!(
                f,
                "improper transfer function: numerator degree {num_degree} > denominator degree {den_degree}"
            ),
            Error::IllPosedLoop => write!(f, "closed loop is ill-posed (1 + C·G degenerate)"),
            Error::PoleOnUnitCircle { omega } => {
                write!(f, "unbounded response: pole on the unit circle at omega = {omega}")
            }
            Error::FrequencyOutOfRange { omega } => {
                write!(f, "frequency {omega} outside [0, pi]")
            }
            Error::RootsNotConverged { iterations, residual } => write!(
                f,
                "root finder did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::Unstable => write!(f, "system is not stable"),
            Error::TailNotCertified { samples } => {
                write!(f, "impulse-response tail not certified within {samples} samples")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::EmptySequence => write!(f, "sequence is empty"),
            Error::ZeroVariance => write!(f, "reference signal has zero variance"),
            Error::InvalidSnr => write!(f, "SNR must be finite"),
            Error::UnsupportedRegisterLength(n) => {
                write!(f, "unsupported PRBS register length {n} (supported: 5..=16)")
            }
            Error::InvalidSize { what, value } => write!(f, "invalid {what}: {value}"),
            Error::InsufficientData { samples, order } => write!(
                f,
                "{samples} samples are not enough to identify {} coefficients",
                order + 1
            ),
            Error::InvalidHyperparameter { what, value } => {
                write!(f, "invalid hyperparameter {what} = {value}")
            }
            Error::RankDeficient { condition } => {
                write!(f, "regression is rank deficient (condition estimate {condition:e})")
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            Error::TuningFailed => write!(f, "marginal likelihood is non-finite on the entire grid"),
            Error::NotConverged { estimate, residual } => write!(
                f,
                "singular value iteration did not converge (last estimate {estimate}, residual {residual:e})"
            ),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
