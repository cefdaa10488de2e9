//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a group element: {0}")]
    NotGroupElement(String),

    #[error("not a reflection: {0}")]
    NotReflection(String),

    #[error("root is not unit-normalized: {0}")]
    NotUnitRoot(String),

    #[error("not a root: {0}")]
    NotARoot(String),

    #[error("Dyer criterion violated for roots {i} and {j}: pairing2 = {value}")]
    DyerViolation { i: usize, j: usize, value: i128 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("cap of {cap} exceeded: {msg}")]
    CapExceeded { cap: usize, msg: String },

    #[error("parabolic subgroup is finite: {0}")]
    FiniteParabolic(String),

    #[error("free-product check not verified to depth {needed}")]
    FreenessUnverified { needed: usize },

    /// A check failed that, were the inputs valid, would contradict a theorem.
    /// Surfacing these loudly is the point: they are falsification channels.
    #[error("falsification: {0}")]
    Falsification(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
