use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Arguments outside the mathematical domain of a counting function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A rank, index or bit word outside its valid range.
    #[error("out of range: {0}")]
    Range(String),

    #[error("invalid constellation: {0}")]
    Constellation(String),

    /// Variant parameters that do not fit together.
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("bit-width mismatch: expected {expected} bits, got {actual}")]
    Width { expected: u32, actual: u32 },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("search budget exhausted after {examined} candidate subsets at clique size {k}")]
    BudgetExhausted { k: usize, examined: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
