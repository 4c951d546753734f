use thiserror::Error;

/// Failures mapped onto process exit codes: 1 for anything the user can fix
/// in the input, 2 for a numerical breakdown inside the library.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn field(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {msg}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    /// Attach the scenario field a library error came from.
    pub fn core(field: &str, e: privwit::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(format!("{field}: {e}"))
        } else {
            CliError::Validation(format!("{field}: {e}"))
        }
    }
}

impl From<privwit::Error> for CliError {
    fn from(e: privwit::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}
