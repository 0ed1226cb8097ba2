use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A search or enumeration would exceed the configured budget.
    #[error("budget exceeded: {what} needs {needed}, budget allows {allowed}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        allowed: u128,
    },

    /// A table length does not match `domain_size^arity`.
    #[error("length mismatch for {what}: arity {arity} over {domain_size} elements needs {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        arity: usize,
        domain_size: usize,
        expected: usize,
        got: usize,
    },

    /// Malformed input data; `location` points at the offending field.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// An operation expected a core language but the input is not one.
    #[error("language is not a core (witness: {witness})")]
    NotACore { witness: String },

    /// An operation requires a core language up front.
    #[error("operation requires a core language: {context}")]
    CoreRequired { context: String },

    /// A candidate operation is not a polymorphism of the language.
    #[error("operation is not a polymorphism: violates feasibility of {function}")]
    NotAPolymorphism { function: String },

    /// A weighting mentions operations outside the language's polymorphisms.
    #[error("weighting base contains a non-polymorphism: {function}")]
    BaseNotPolymorphisms { function: String },

    /// The domain size is outside what the operation supports.
    #[error("unsupported domain size {got}: {context}")]
    DomainSize { got: usize, context: String },

    /// The supplied partition is not compatible with the supplied operations.
    #[error("partition is not a congruence: operation {operation} splits a class")]
    IncompatibleCongruence { operation: String },

    /// The supplied subset is not closed under the supplied operations.
    #[error("subset is not a subuniverse: operation {operation} leaves it")]
    NotASubuniverse { operation: String },

    /// The conservative classifier needs every 0/1-valued unary function.
    #[error("conservative classification requires all zero/one-valued unary functions: missing {missing}")]
    ConservativityRequired { missing: String },

    /// A reduction needs a hardness certificate that was not supplied.
    #[error("operation requires a hardness certificate: {context}")]
    CertificateRequired { context: String },

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
