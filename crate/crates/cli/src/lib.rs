//! Command-line front end: input files, reports and the subcommands behind `liouville`.

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{CliError, Settings, Source};
pub use input::{parse_input, OdeInput};
pub use report::{Report, Status};
