use std::path::Path;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }

    /// Classify a library error raised while handling input data.
    pub fn from_data(err: featsel::Error) -> Self {
        use featsel::Error as E;
        match err {
            E::InvalidDimension(_) | E::InvalidConfig(_) | E::InvalidSampleSize { .. } | E::Domain(_) => {
                CliError::Data(err.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<featsel::Error> for CliError {
    fn from(err: featsel::Error) -> Self {
        use featsel::Error as E;
        match err {
            E::InvalidConfig(_) | E::InvalidDimension(_) | E::InvalidSampleSize { .. } | E::OutOfAsymptoticRange { .. } => {
                CliError::Config(err.to_string())
            }
            E::Domain(_) | E::NotPositiveSemidefinite(_) | E::DegenerateMatrix(_) | E::TooManyDiscarded { .. } => {
                CliError::Numerical(err.to_string())
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
