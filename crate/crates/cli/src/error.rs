use nftgraph::detection::DetectError;
use nftgraph::indicators::IndicatorError;
use nftgraph::ingest::{FormatError, RpcError, StreamError};
use thiserror::Error;

/// Failures split by exit status: bad inputs exit 1, bad configuration exits 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<RpcError> for CliError {
    fn from(e: RpcError) -> Self {
        match e {
            RpcError::Precondition(m) => CliError::Config(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<IndicatorError> for CliError {
    fn from(e: IndicatorError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::Config(c) => CliError::Config(c.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
