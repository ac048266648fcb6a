//! Error types shared across the simulator.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration failed validation (bad counts, signs, list lengths).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operation received an input outside its mathematical domain.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A user offloads a positive fraction over a link with zero rate.
    #[error("infeasible offload: {0}")]
    InfeasibleOffload(String),

    /// One of the optimization constraints does not hold.
    #[error("constraint {constraint} violated: {detail}")]
    Constraint {
        constraint: &'static str,
        detail: String,
    },

    /// Input that makes the requested quantity undefined (e.g. zero total
    /// task length in a proportional split).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Vector/matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A brute-force enumeration would exceed the candidate budget.
    #[error("enumeration too large: {0}")]
    EnumerationGuard(String),

    /// Non-finite value where a finite one is required.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn constraint(constraint: &'static str, detail: impl Into<String>) -> Self {
        Error::Constraint {
            constraint,
            detail: detail.into(),
        }
    }
}
