use crate::config::ConfigError;

/// Failure of a CLI command, with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<radpol::Error> for CliError {
    fn from(e: radpol::Error) -> Self {
        use radpol::Error as E;
        match e {
            E::Io(_) | E::MalformedMap(_) => CliError::Io(e.to_string()),
            E::InvalidEnsemble(_) | E::InvalidNoise(_) | E::InvalidGrid(_) => {
                CliError::Config(ConfigError::Validation { field: "config".into(), message: e.to_string() })
            }
            E::IndexOutOfRange { .. } | E::SingularMatrix { .. } | E::RankDeficient { .. } | E::InconsistentScale { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
