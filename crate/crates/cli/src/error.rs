use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("budget exceeded: {nodes} nodes requested, cap {cap}")]
    Budget { nodes: u128, cap: u128 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps a library error raised while handling `field`.
    pub fn core(field: impl Into<String>, e: bernstein_core::Error) -> Self {
        match e {
            bernstein_core::Error::BudgetExceeded { nodes, cap } => CliError::Budget { nodes, cap },
            other => CliError::validation(field, other.to_string()),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => 2,
            CliError::Budget { .. } => 3,
        }
    }
}
