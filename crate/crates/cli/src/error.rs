use std::fmt;

use serde::Serialize;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitKind {
    Pass = 0,
    CheckFailure = 1,
    Config = 2,
    Numerical = 3,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    ConfigFile { path: String, message: String },

    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error(transparent)]
    Core(#[from] focklab::Error),
}

impl CliError {
    pub fn invalid(key: impl Into<String>, reason: impl fmt::Display) -> Self {
        CliError::Invalid { key: key.into(), reason: reason.to_string() }
    }

    pub fn kind(&self) -> ExitKind {
        use focklab::Error as E;
        match self {
            CliError::ConfigFile { .. } | CliError::Invalid { .. } => ExitKind::Config,
            CliError::Core(e) => match e {
                E::InvalidParameter { .. } | E::NotRadial(_) | E::NotModeDecomposable(_) | E::Parse(_) | E::Io(_) | E::Csv(_) => {
                    ExitKind::Config
                }
                _ => ExitKind::Numerical,
            },
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
