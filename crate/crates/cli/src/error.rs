use flagfiber::Error;
use thiserror::Error as ThisError;

/// Failure of a command, carrying its exit code.
#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input invariant violated: {0}")]
    Input(Error),
    #[error("solver failed: {0}")]
    Solver(Error),
    #[error("{0}")]
    OutOfRadius(Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    /// 0 pass, 1 invariant failure, 2 config, 3 input, 4 solver, 5 radius.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Input(_) => 3,
            CliError::Solver(_) => 4,
            CliError::OutOfRadius(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SolverDiverged(_) | Error::NoConvergence(_) => CliError::Solver(e),
            Error::OutOfRadius(_) => CliError::OutOfRadius(e),
            other => CliError::Input(other),
        }
    }
}
