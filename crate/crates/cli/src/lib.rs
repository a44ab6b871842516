//! Batch front-end for `flagfiber`: invariant suites, experiments and
//! JSON/CSV file plumbing.

pub mod commands;
pub mod error;
pub mod io;
pub mod verify;

pub use error::CliError;
