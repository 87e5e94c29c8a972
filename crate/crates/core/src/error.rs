use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Invalid parameters or a violated operation precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A configured size cap would be exceeded.
    #[error("resource cap exceeded: {what} needs {requested}, cap is {cap}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        LabError::Contract(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Contract(_) | LabError::Json(_) => 2,
            LabError::Resource { .. } => 3,
            LabError::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
