use std::fmt;

use hubbard_rg::Error;

/// Exit status 1 for bad input, 2 for a numerical failure.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::CollapseInput(_)
            | Error::LevelOutOfRange { .. }
            | Error::SectorOutOfRange { .. }
            | Error::SiteOutOfRange { .. }
            | Error::BondOutOfRange { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub fn io_error(path: &std::path::Path, e: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{}: {e}", path.display()))
}
