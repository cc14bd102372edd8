use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("statement on line {line} is not well-formed")]
    MalformedStatement { line: usize },
    #[error("feature catalog mismatch: model has {expected} columns, matrix has {found}")]
    CatalogMismatch { expected: usize, found: usize },
    #[error("budget {budget} out of range for {rows} rows (need 1 < b <= n)")]
    BudgetOutOfRange { budget: usize, rows: usize },
    #[error("nu must lie in (0, 1], got {0}")]
    InvalidNu(f64),
    #[error("invalid kernel parameter: {0}")]
    InvalidKernel(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("schema error on line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("unsatisfiable schema constraint: {0}")]
    Unsatisfiable(String),
    #[error("no eligible triples for corruption")]
    NothingToCorrupt,
    #[error("empty ground truth")]
    EmptyGroundTruth,
}
