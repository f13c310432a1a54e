use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column `{column}`")]
    MissingColumn { column: String },

    #[error("row {row}, column `{column}`: expected 0 or 1, got `{value}`")]
    NonBinaryValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column `{column}`: score `{value}` is not a number in [0, 1]")]
    ScoreOutOfRange {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column `{column}`: group `{group}` is not declared")]
    UnknownGroup {
        row: usize,
        column: String,
        group: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid utility weights: {0}")]
    InvalidWeights(String),

    #[error("invalid claims differentiator: {0}")]
    InvalidClaims(String),

    #[error("empty relevant group(s): {}", keys.join(", "))]
    EmptyRelevantGroup { keys: Vec<String> },

    #[error("not defined: {0}")]
    NotDefined(String),

    #[error("prioritarian weight k must be > 1, got {0}")]
    InvalidK(f64),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("rate undefined for group `{group}`: no records with {cell}")]
    UndefinedRate { group: String, cell: String },

    #[error("weight conditions violated: {0}")]
    ConditionViolated(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("record `{record}` has no score; threshold rules need scores")]
    MissingScore { record: String },

    #[error("invalid decision rule: {0}")]
    InvalidRule(String),

    #[error("infeasible rule space: {0}")]
    InfeasibleSpace(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by an undefined quantity (empty cell, empty
    /// relevant group) rather than malformed input.
    pub fn is_undefined(&self) -> bool {
        matches!(
            self,
            Error::EmptyRelevantGroup { .. } | Error::NotDefined(_) | Error::UndefinedRate { .. }
        )
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::MissingColumn { .. } => "missing_column",
            Error::NonBinaryValue { .. } => "non_binary_value",
            Error::ScoreOutOfRange { .. } => "score_out_of_range",
            Error::UnknownGroup { .. } => "unknown_group",
            Error::EmptyDataset => "empty_dataset",
            Error::InvalidDataset(_) => "invalid_dataset",
            Error::InvalidWeights(_) => "invalid_weights",
            Error::InvalidClaims(_) => "invalid_claims",
            Error::EmptyRelevantGroup { .. } => "empty_relevant_group",
            Error::NotDefined(_) => "not_defined",
            Error::InvalidK(_) => "invalid_k",
            Error::InvalidPattern(_) => "invalid_pattern",
            Error::UndefinedRate { .. } => "undefined_rate",
            Error::ConditionViolated(_) => "condition_violated",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::MissingScore { .. } => "missing_score",
            Error::InvalidRule(_) => "invalid_rule",
            Error::InfeasibleSpace(_) => "infeasible_space",
            Error::Config(_) => "config",
        }
    }
}
