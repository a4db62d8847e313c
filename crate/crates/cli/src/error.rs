use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config entries or input files.
    #[error("{0}")]
    Validation(String),

    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: wqed_core::Error,
    },

    #[error("{0} verification check(s) failed")]
    VerificationFailed(usize),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// Wraps a core error, treating bad input as a validation failure.
    pub fn from_core(module: &'static str, source: wqed_core::Error) -> Self {
        match source {
            wqed_core::Error::InvalidInput(msg) | wqed_core::Error::InvalidWavepacket(msg) => {
                CliError::Validation(format!("{module}: {msg}"))
            }
            source => CliError::Numerical { module, source },
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) | CliError::Output(_) => ExitCode::from(1),
            CliError::Numerical { .. } | CliError::VerificationFailed(_) => ExitCode::from(2),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
