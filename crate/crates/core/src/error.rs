use core::fmt;

/// Failures reported by constructors and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The coefficient list is empty or describes a constant.
    DegreeTooSmall { degree: usize, min: usize },
    /// Leading coefficient is zero.
    ZeroLeadingCoefficient,
    /// Constant coefficient is zero where an invertible matrix is required.
    ZeroConstantTerm,
    /// A coefficient or intermediate value is NaN or infinite.
    NonFinite,
    /// Two lists that must pair up have different lengths.
    LengthMismatch { left: usize, right: usize },
    /// Index outside the active window.
    OutOfWindow { i: usize, j: usize },
    /// The active window is smaller than the operation needs.
    WindowTooSmall { size: usize },
    /// A generator or option parameter is outside its domain.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegreeTooSmall { degree, min } => {
                write!(f, "degree {degree} is below the minimum {min}")
            }
            Error::ZeroLeadingCoefficient => f.write_str("leading coefficient is zero"),
            Error::ZeroConstantTerm => f.write_str("constant coefficient is zero"),
            Error::NonFinite => f.write_str("non-finite value encountered"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::OutOfWindow { i, j } => write!(f, "entry ({i}, {j}) is outside the active window"),
            Error::WindowTooSmall { size } => write!(f, "active window of size {size} is too small"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
