use thiserror::Error;

/// Failure of a CLI run, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<sqcomb::Error> for CliError {
    fn from(err: sqcomb::Error) -> Self {
        match err {
            sqcomb::Error::Domain(_) | sqcomb::Error::NotModeled(_) => {
                CliError::Config(err.to_string())
            }
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}
