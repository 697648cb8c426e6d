use alloc::string::String;
use core::fmt;

/// Errors raised by the expansion machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operator kind name not recognised.
    UnknownOperatorKind(String),
    /// `alpha` supplied for a kind that takes none, or missing for `shifted_bessel`.
    AlphaMismatch { kind: &'static str, supplied: bool },
    /// Subdiagonal entry `h_{index+1,index}` is zero (1-based `index`).
    ZeroSubdiagonal { index: usize },
    /// Norm bound `C` must be positive and finite.
    InvalidNormBound(f64),
    /// A dimension, order or truncation parameter was zero.
    ZeroDimension,
    /// Jets of different orders were combined.
    OrderMismatch { left: usize, right: usize },
    /// More Taylor coefficients were requested than a jet holds.
    OrderTooSmall { required: usize, available: usize },
    /// Jet order above the double-precision factorial limit.
    OrderTooLarge { requested: usize, max: usize },
    /// Function evaluated outside its domain of analyticity.
    Domain { function: &'static str, value: f64 },
    /// Expression text could not be parsed.
    Parse { position: usize, message: String },
    /// Expression references a parameter with no binding.
    UnboundParameter(String),
    /// Matrix shapes do not agree.
    DimensionMismatch { expected: usize, found: usize },
    /// Matrix has a non-negligible entry below the subdiagonal.
    NotHessenberg { row: usize, col: usize, value: f64 },
    /// Linear system singular to working precision.
    Singular { pivot: usize },
    /// Non-finite values appeared (input or after squaring).
    Overflow,
    /// A series did not converge within the allowed number of terms.
    NonConvergence { terms: usize },
    /// Arguments outside the supported box of a reference routine.
    OutOfRange { what: &'static str, value: f64 },
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroSubdiagonal { .. }
                | Error::Singular { .. }
                | Error::Overflow
                | Error::NonConvergence { .. }
                | Error::NotHessenberg { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownOperatorKind(k) => write!(f, "unknown operator kind `{k}`"),
            Error::AlphaMismatch { kind, supplied: true } => {
                write!(f, "operator kind `{kind}` does not take an alpha parameter")
            }
            Error::AlphaMismatch { kind, supplied: false } => {
                write!(f, "operator kind `{kind}` requires an alpha parameter")
            }
            Error::ZeroSubdiagonal { index } => write!(
                f,
                "subdiagonal entry h[{},{}] is zero: the Krylov matrix K_n(H_n, e_1) is invertible \
                 only if every subdiagonal element of H_n is non-zero",
                index + 1,
                index
            ),
            Error::InvalidNormBound(c) => write!(f, "norm bound C must be positive and finite, got {c}"),
            Error::ZeroDimension => write!(f, "dimension must be at least 1"),
            Error::OrderMismatch { left, right } => {
                write!(f, "jet orders differ ({left} vs {right})")
            }
            Error::OrderTooSmall { required, available } => {
                write!(f, "need {required} Taylor coefficients but only {available} are available")
            }
            Error::OrderTooLarge { requested, max } => {
                write!(f, "jet order {requested} exceeds the supported maximum {max}")
            }
            Error::Domain { function, value } => {
                write!(f, "{function} is not analytic at argument {value}")
            }
            Error::Parse { position, message } => {
                write!(f, "syntax error at position {position}: {message}")
            }
            Error::UnboundParameter(name) => write!(f, "parameter `{name}` is not bound"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHessenberg { row, col, value } => write!(
                f,
                "matrix is not upper Hessenberg: entry ({row},{col}) = {value}"
            ),
            Error::Singular { pivot } => {
                write!(f, "matrix is singular to working precision at pivot {pivot}")
            }
            Error::Overflow => write!(f, "non-finite values encountered (overflow)"),
            Error::NonConvergence { terms } => {
                write!(f, "series did not converge within {terms} terms")
            }
            Error::OutOfRange { what, value } => write!(f, "{what} = {value} is outside the supported range"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
