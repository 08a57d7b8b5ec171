use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io { .. } | CliError::Read { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<gie_lab::Error> for CliError {
    fn from(e: gie_lab::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(format!(
                "{e}; try a smaller --dt, a larger --n, or a weaker --g"
            ))
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
