use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numeric(gzscar_core::Error),
}

impl From<gzscar_core::Error> for CliError {
    fn from(e: gzscar_core::Error) -> Self {
        match e {
            // parameter validation surfaces as domain errors from the core
            gzscar_core::Error::Domain(m) => CliError::Usage(m),
            e @ gzscar_core::Error::DimensionCap { .. } => CliError::Usage(e.to_string()),
            e => CliError::Numeric(e),
        }
    }
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
