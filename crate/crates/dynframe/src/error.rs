use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] dynframe_core::Error),
    #[error("oracle disagreement: {0}")]
    Disagreement(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure or disagreement.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(dynframe_core::Error::NumericalFailure(_)) | CliError::Disagreement(_) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
