use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] qbattery::Error),

    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    /// 1 config error, 2 verification failure, 3 resource cap exceeded.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(qbattery::Error::DimensionCap { .. }) => 3,
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}
