//! IO, JSON schemas, instance generation and verification suites for the
//! cbkern operator-kernel library, plus the command implementations behind
//! the `cbkern` binary.

pub mod error;
pub mod gen;
pub mod io;
pub mod report;
pub mod run;
pub mod verify;

pub use error::CliError;
