use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid transformer `{0}`: rating must be positive")]
    InvalidTransformer(String),

    #[error("branch `{0}` has zero series impedance")]
    SingularBranch(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Schema {
        line: Option<usize>,
        message: String,
    },

    #[error("network failed validation:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
