use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario {path} is not valid: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: gravmetro::Error,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("Cramér-Rao bound violated: {0}")]
    CrbViolation(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Scenario {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CrbViolation(_) => 3,
            _ => 2,
        }
    }
}

/// Attaches a context string to core errors.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for gravmetro::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: what.to_string(),
            source,
        })
    }
}
