//! Library surface of the `blrs` command-line tool, split out so integration
//! tests can drive the commands directly.

pub mod benchmark;
pub mod error;
pub mod fit;
pub mod gen;
pub mod input;
pub mod predict;
pub mod split;
pub mod table;

pub use error::CliError;
