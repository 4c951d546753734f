use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("label sets overlap on `{0}`")]
    OverlappingLabels(String),

    #[error("operator is not hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("kraus family is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("POVM elements do not sum to identity (deviation {0:.3e})")]
    IncompletePovm(f64),

    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("trace norm {norm} exceeds 1/2")]
    TraceNormTooLarge { norm: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures that come from a numerically invalid object
    /// (lost positivity, trace drift, broken CPTP condition) rather than
    /// from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_)
                | Error::NotPositive(_)
                | Error::TraceNotOne(_)
                | Error::NotNormalized(_)
                | Error::NotTracePreserving(_)
                | Error::NotUnitary(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
