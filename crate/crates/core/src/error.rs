use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("column `{0}` is declared in the schema but missing from the data header")]
    UnknownColumn(String),

    #[error("column `{0}` appears in the data header but has no schema entry")]
    UndeclaredColumn(String),

    #[error("schema declares no decision column")]
    MissingDecision,

    #[error("dataset has no examples")]
    EmptyDataset,

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    ParseNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },

    #[error("row {row}, column `{column}`: value `{value}` is not in the training domain")]
    UnknownValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset needs at least two classes, found {0}")]
    TooFewClasses(usize),

    #[error("class `{0}` is not present in the dataset")]
    UnknownClass(String),

    #[error("class `{class}` has {count} examples, fewer than the {folds} folds requested")]
    ClassTooSmall {
        class: String,
        count: usize,
        folds: usize,
    },

    #[error("fold count must be at least 2, got {0}")]
    FoldCount(usize),

    #[error("source and target class must differ (both `{0}`)")]
    SameClasses(String),

    #[error("unknown measure `{0}`; valid names: precision, wlap, c2, gain, corr, rss, lift")]
    UnknownMeasure(String),

    #[error("verifier used before fit")]
    UnfittedVerifier,

    #[error("external verifier: {0}")]
    Verifier(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
}
