use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI invocation, each mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] zenoline_core::Error),

    #[error("quadrature not converged: {0}")]
    NotConverged(String),
}

impl CliError {
    /// 2 for bad input, 3 for a violated numerical contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(zenoline_core::Error::Domain("s < 0".into())).exit_code(), 3);
        assert_eq!(CliError::Core(zenoline_core::Error::TooFewRows { rows: 2 }).exit_code(), 2);
        assert_eq!(CliError::NotConverged("T = 3".into()).exit_code(), 3);
    }
}
