use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl From<coherence_core::Error> for CliError {
    fn from(e: coherence_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}
