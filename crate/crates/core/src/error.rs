use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("non-numeric cell at row {row}, column `{column}`: {value:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("quoted fields are not supported (row {row})")]
    QuotedField { row: usize },
    #[error("need at least 2 data rows, found {0}")]
    TooFewRows(usize),
    #[error("need at least 1 predictor column")]
    NoPredictors,
    #[error("constant predictor column `{0}`")]
    ConstantColumn(String),
    #[error("dataset is already standardized")]
    AlreadyStandardized,
    #[error("dataset is not standardized")]
    NotStandardized,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is singular or nearly singular (pivot {pivot})")]
    Singular { pivot: usize },
    #[error("parameter {name} = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("covariance undefined at interpolating fit")]
    DegenerateResidual,
    #[error("d undefined for null OLS fit")]
    NullOlsFit,
    #[error("anchor vector is all zero")]
    ZeroAnchor,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid fold count K = {k} for n = {n}")]
    Folds { k: usize, n: usize },
    #[error("unknown simulation example {0} (expected 1..=5)")]
    UnknownExample(usize),
    #[error("estimator {0} is not applicable to this design")]
    Inapplicable(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Parameter { name, value, range }
    }
}
