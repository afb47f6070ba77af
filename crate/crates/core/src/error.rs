use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("both classes must be present (positives: {positives}, negatives: {negatives})")]
    SingleClass { positives: usize, negatives: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("label at index {index} is {value}, expected -1 or +1")]
    InvalidLabel { index: usize, value: i64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("coefficient mass must be positive")]
    ZeroMass,

    #[error("barycenters coincided on {consecutive} consecutive iterations (last at iteration {iteration})")]
    Degenerate {
        iteration: usize,
        consecutive: usize,
    },

    #[error("hyperplane has a zero weight vector")]
    DegenerateHyperplane,

    #[error("selection rule kept no instances")]
    EmptySelection,

    #[error(
        "reduced subset contains a single class (positives: {positives}, negatives: {negatives})"
    )]
    SubsetSingleClass { positives: usize, negatives: usize },

    #[error("generator stalled after {draws} draws")]
    GenerationStalled { draws: usize },

    #[error("monomial basis size overflows for p={p}, degree={degree}")]
    BasisOverflow { p: usize, degree: usize },

    #[error("gamma must be positive, got {0}")]
    InvalidGamma(f64),

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    DivergenceDetected { epoch: usize },

    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),

    #[error("file has no data rows")]
    EmptyFile,

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("after label mapping only one class remains (positive label `{0}`)")]
    SingleClassAfterMapping(String),

    #[error("column `{0}` is not present in the input header")]
    UnknownColumn(String),

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
