use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sigdiff::io::cli::{self, CliError, DatasetSource, OrderSpec, OutputFormat, RunSpec};

#[derive(Parser)]
#[command(
    name = "sigdiff",
    version,
    about = "Switch-feedback pattern sequence simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the per-pass node value table
    Run(CommonArgs),
    /// Print the per-event, per-node trace
    Trace(CommonArgs),
    /// Compare ordering signatures across presentation orders
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// `all` or `sample:N`
        #[arg(long, default_value = "all")]
        orderings: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Built-in dataset name (fig2, demo) or path to a pattern file
    #[arg(long, default_value = "fig2")]
    dataset: String,
    /// identity, reversed, or comma-separated 1-based pattern ids
    #[arg(long, default_value = "identity")]
    order: String,
    /// accumulate or clear
    #[arg(long, default_value = "accumulate")]
    mode: String,
    #[arg(long, default_value_t = 6)]
    passes: usize,
    /// Inputs strictly above this value are strong
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    threshold: f64,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Emit the event trace instead of the table
    #[arg(long)]
    trace: bool,
}

impl CommonArgs {
    fn into_spec(self) -> Result<RunSpec, CliError> {
        let dataset: DatasetSource = self.dataset.parse().unwrap_or_else(|e| match e {});
        Ok(RunSpec {
            dataset,
            order: self.order.parse::<OrderSpec>().map_err(CliError::Input)?,
            mode: cli::parse_mode(&self.mode).map_err(CliError::Input)?,
            passes: self.passes,
            threshold: self.threshold,
            format: self
                .format
                .parse::<OutputFormat>()
                .map_err(CliError::Input)?,
            trace: self.trace,
        })
    }
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Run(args) => cli::run_command(&args.into_spec()?),
        Command::Trace(args) => cli::trace_command(&args.into_spec()?),
        Command::Sweep {
            common,
            orderings,
            seed,
        } => {
            let selector = cli::parse_orderings(&orderings, seed).map_err(CliError::Input)?;
            cli::sweep_command(&common.into_spec()?, selector)
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(parsed.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sigdiff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
