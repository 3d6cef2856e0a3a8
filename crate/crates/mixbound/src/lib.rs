//! File formats, reports, threading and the command implementations behind
//! the `mixbound` binary. The analysis itself lives in `mixbound-core`.

pub mod chain_file;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;

pub use chain_file::{chain_to_json, parse_chain, read_chain, ChainFile};
pub use config::{Format, RunConfig};
pub use error::{exit, CliError, CliResult};
pub use output::{Cell, Report, Table};
