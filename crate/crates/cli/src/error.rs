use std::path::PathBuf;

use serde::Serialize;
use watermark_probe::{Error, Scenario};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{message}")]
    Config {
        message: String,
        scenario: Option<Scenario>,
    },
    #[error("{source}")]
    Core {
        #[source]
        source: Error,
        scenario: Option<Scenario>,
    },
}

/// Machine-readable error printed to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<u64>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
            scenario: None,
        }
    }

    pub fn in_scenario(self, scenario: Option<Scenario>) -> Self {
        match self {
            CliError::Config { message, .. } => CliError::Config { message, scenario },
            CliError::Core { source, .. } => CliError::Core { source, scenario },
        }
    }

    pub fn report(&self) -> ErrorReport {
        match self {
            CliError::Config { message, scenario } => ErrorReport {
                error: "config",
                exit_code: EXIT_CONFIG,
                message: message.clone(),
                scenario: *scenario,
                file: None,
                offset: None,
            },
            CliError::Core { source, scenario } => {
                let (error, exit_code) = classify(source);
                let (file, offset) = match source {
                    Error::Format { path, offset, .. } => (Some(path.clone()), Some(*offset)),
                    Error::Io { path, .. }
                    | Error::Manifest { path, .. }
                    | Error::Image { path, .. }
                    | Error::Csv { path, .. } => (Some(path.clone()), None),
                    _ => (None, None),
                };
                ErrorReport {
                    error,
                    exit_code,
                    message: source.to_string(),
                    scenario: *scenario,
                    file,
                    offset,
                }
            }
        }
    }
}

fn classify(e: &Error) -> (&'static str, i32) {
    match e {
        Error::InvalidSpec(_) | Error::Font(_) | Error::TextTooLarge { .. } | Error::OutOfRange { .. } => {
            ("config", EXIT_CONFIG)
        }
        Error::NonFiniteLoss { .. } => ("numerical", EXIT_NUMERIC),
        Error::Format { .. } => ("format", EXIT_DATA),
        _ => ("data", EXIT_DATA),
    }
}

impl From<Error> for CliError {
    fn from(source: Error) -> Self {
        CliError::Core {
            source,
            scenario: None,
        }
    }
}
