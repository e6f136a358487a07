use thiserror::Error;

pub type Result<T, E = MnError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MnError {
    #[error("series live in different fields")]
    SpecMismatch,
    #[error("series were truncated under different gradings")]
    GradingMismatch,
    #[error("invalid field specification: {0}")]
    InvalidSpec(String),
    #[error("order twist is singular (jacobian number is 0)")]
    SingularTwist,
    #[error("division by zero series")]
    ZeroDivisor,
    #[error("operation needs a nonzero series")]
    ZeroSeries,
    #[error("argument has nonpositive order")]
    NonpositiveOrder,
    #[error("initial term is not 1")]
    BadInitialTerm,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unbound name `{0}`")]
    UnboundVariable(String),
    #[error("requested coefficients lie outside the guaranteed precision")]
    OutOfPrecision,
    #[error("grading is not positive on the expansion argument")]
    WeightNotPositive,
    #[error("initial term cannot be certified at the current precision")]
    IndeterminateInitialTerm,
    #[error("jacobian number is 0 and the integrand is not a Laurent polynomial")]
    RefusedSingular,
    #[error("expansion failed in the target field: {0}")]
    ExpansionFailure(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-integer exponent at {pos}")]
    NonIntegerExponent { pos: usize },
    #[error("change of variables must have identity linear part and no constant term")]
    BadNormalization,
    #[error("{0}")]
    Usage(String),
}

impl MnError {
    /// Stable diagnostic code used by the command-line tool.
    pub fn code(&self) -> &'static str {
        match self {
            MnError::SpecMismatch => "E_SPEC_MISMATCH",
            MnError::GradingMismatch => "E_GRADING_MISMATCH",
            MnError::InvalidSpec(_) => "E_INVALID_SPEC",
            MnError::SingularTwist => "E_SINGULAR_TWIST",
            MnError::ZeroDivisor => "E_ZERO_DIVISOR",
            MnError::ZeroSeries => "E_ZERO_SERIES",
            MnError::NonpositiveOrder => "E_NONPOSITIVE_ORDER",
            MnError::BadInitialTerm => "E_BAD_INITIAL_TERM",
            MnError::UnknownVariable(_) => "E_UNKNOWN_VARIABLE",
            MnError::UnboundVariable(_) => "E_UNBOUND_VARIABLE",
            MnError::OutOfPrecision => "E_OUT_OF_PRECISION",
            MnError::WeightNotPositive => "E_WEIGHT_NOT_POSITIVE",
            MnError::IndeterminateInitialTerm => "E_INDETERMINATE_INITIAL_TERM",
            MnError::RefusedSingular => "E_REFUSED_SINGULAR",
            MnError::ExpansionFailure(_) => "E_EXPANSION_FAILURE",
            MnError::Syntax { .. } => "E_SYNTAX",
            MnError::NonIntegerExponent { .. } => "E_NON_INTEGER_EXPONENT",
            MnError::BadNormalization => "E_BAD_NORMALIZATION",
            MnError::Usage(_) => "E_USAGE",
        }
    }

    /// True for errors caused by malformed input rather than by mathematics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            MnError::InvalidSpec(_)
                | MnError::UnknownVariable(_)
                | MnError::UnboundVariable(_)
                | MnError::Syntax { .. }
                | MnError::NonIntegerExponent { .. }
                | MnError::Usage(_)
        )
    }
}
