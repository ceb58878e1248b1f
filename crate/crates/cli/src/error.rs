use std::fmt;
use std::process::ExitCode;

/// Failure of a command, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, or a value the library rejected.
    Input(String),
    Library(geocoh::Error),
    /// Verification or acceptance checks failed; the report was still written.
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Library(e) => match e {
                geocoh::Error::NoConvergence { .. } => 3,
                geocoh::Error::WrongArity { .. } => 4,
                geocoh::Error::DependentEnsemble { .. } => 5,
                _ => 2,
            },
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::ChecksFailed(msg) => f.write_str(msg),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<geocoh::Error> for CliError {
    fn from(e: geocoh::Error) -> Self {
        CliError::Library(e)
    }
}
