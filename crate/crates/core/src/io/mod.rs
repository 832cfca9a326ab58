//! Dataset ingestion and the command layer of the CLI.

pub mod cli;
pub mod format;

pub use self::cli::{
    run_command, sweep_command, trace_command, CliError, DatasetSource, OrderSpec, OutputFormat,
    OutputTable, RunSpec,
};
pub use self::format::{parse_dataset, render_cell, render_dataset, ParseError, ParseErrorKind};
