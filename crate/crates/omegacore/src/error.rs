//! Error and validation-violation types shared across the crate.

use thiserror::Error;

/// A single defect found while validating a structure.
///
/// Violations are data, not errors: validation reports all of them at once so
/// a caller can fix a malformed input in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A relation symbol with an empty name.
    EmptySymbolName,
    /// The same relation symbol is declared twice.
    DuplicateSymbol(String),
    /// A relation symbol declared with arity zero.
    ZeroArity(String),
    /// The structure has no tuple set for a declared symbol.
    MissingRelation(String),
    /// The structure has a tuple set for an undeclared symbol.
    UnknownRelation(String),
    /// A tuple whose length differs from the declared arity.
    ArityMismatch {
        symbol: String,
        tuple: Vec<usize>,
        expected: usize,
    },
    /// A tuple entry outside `0..domain_size`.
    OutOfDomain {
        symbol: String,
        tuple: Vec<usize>,
        entry: usize,
    },
    /// The same tuple listed twice for one symbol.
    DuplicateTuple { symbol: String, tuple: Vec<usize> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EmptySymbolName => write!(f, "relation symbol with empty name"),
            Violation::DuplicateSymbol(s) => write!(f, "duplicate relation symbol `{s}`"),
            Violation::ZeroArity(s) => write!(f, "relation symbol `{s}` has arity 0"),
            Violation::MissingRelation(s) => write!(f, "missing relation `{s}`"),
            Violation::UnknownRelation(s) => write!(f, "unknown relation `{s}`"),
            Violation::ArityMismatch {
                symbol,
                tuple,
                expected,
            } => write!(
                f,
                "tuple {tuple:?} in `{symbol}` has length {}, expected {expected}",
                tuple.len()
            ),
            Violation::OutOfDomain {
                symbol,
                tuple,
                entry,
            } => write!(f, "tuple {tuple:?} in `{symbol}`: entry {entry} out of domain"),
            Violation::DuplicateTuple { symbol, tuple } => {
                write!(f, "duplicate tuple {tuple:?} in `{symbol}`")
            }
        }
    }
}

/// Errors reported by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two structures that must share a signature do not.
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    /// A structure failed validation; all violations are listed.
    #[error("invalid structure: {}", format_violations(.0))]
    InvalidStructure(Vec<Violation>),

    /// A relation symbol that the signature does not declare.
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),

    /// A relation symbol that would collide with an existing one.
    #[error("relation symbol `{0}` already declared")]
    DuplicateSymbol(String),

    /// An operation would exceed a configured capacity bound.
    #[error("capacity exceeded: {what} requires {needed}, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    /// An operation whose precondition is a core structure got a non-core.
    #[error("structure is not a core: {0}")]
    NotACore(String),

    /// Any other malformed argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Convenience constructor for [`Error::InvalidInput`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
