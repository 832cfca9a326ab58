//! Command implementations behind the `sigdiff` binary. Each command
//! returns the full standard-output text so it can be tested without a
//! subprocess.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::format::{parse_dataset, render_cell, ParseError};
use crate::datasets;
use crate::engine::{
    self, Dataset, EngineConfig, EventOutcome, Mode, PresentationOrder, RunReport,
};
use crate::error::Error;
use crate::metrics::{self, OrderingSelector, SweepReport};
use crate::scalar::Scalar;

/// Failure of a CLI command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input or configuration; exit code 1.
    #[error("{0}")]
    Input(String),
    /// An engine invariant failed; exit code 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSource {
    Builtin(String),
    Path(PathBuf),
}

impl FromStr for DatasetSource {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if datasets::builtin_names().contains(&s) {
            DatasetSource::Builtin(s.to_string())
        } else {
            DatasetSource::Path(PathBuf::from(s))
        })
    }
}

/// Presentation order as written by the user: 1-based pattern ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum OrderSpec {
    #[default]
    Identity,
    Reversed,
    Explicit(Vec<usize>),
}

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "identity" => Ok(OrderSpec::Identity),
            "reversed" => Ok(OrderSpec::Reversed),
            list => list
                .split(',')
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(0) | Err(_) => Err(format!("invalid pattern id `{}` in order", t.trim())),
                    Ok(id) => Ok(id - 1),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(OrderSpec::Explicit),
        }
    }
}

impl OrderSpec {
    pub fn resolve(&self, pattern_count: usize) -> Result<PresentationOrder, Error> {
        match self {
            OrderSpec::Identity => Ok(PresentationOrder::identity(pattern_count)),
            OrderSpec::Reversed => Ok(PresentationOrder::reversed(pattern_count)),
            OrderSpec::Explicit(ids) => PresentationOrder::new(ids.clone(), pattern_count),
        }
    }
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "accumulate" => Ok(Mode::Accumulate),
        "clear" => Ok(Mode::ClearPerPattern),
        other => Err(format!(
            "unknown mode `{other}` (expected accumulate or clear)"
        )),
    }
}

/// `all` or `sample:N`; the seed is supplied separately.
pub fn parse_orderings(s: &str, seed: u64) -> Result<OrderingSelector, String> {
    if s == "all" {
        return Ok(OrderingSelector::All);
    }
    let size = s
        .strip_prefix("sample:")
        .and_then(|n| n.parse::<usize>().ok())
        .ok_or_else(|| format!("invalid orderings selector `{s}` (expected all or sample:N)"))?;
    Ok(OrderingSelector::Sample { size, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub dataset: DatasetSource,
    pub order: OrderSpec,
    pub mode: Mode,
    pub passes: usize,
    pub threshold: f64,
    pub format: OutputFormat,
    pub trace: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Builtin("fig2".into()),
            order: OrderSpec::Identity,
            mode: Mode::Accumulate,
            passes: 6,
            threshold: 0.0,
            format: OutputFormat::Csv,
            trace: false,
        }
    }
}

impl RunSpec {
    pub fn load_dataset(&self) -> Result<Dataset<f64>, CliError> {
        match &self.dataset {
            DatasetSource::Builtin(name) => datasets::builtin(name)
                .ok_or_else(|| CliError::Input(format!("unknown built-in dataset `{name}`"))),
            DatasetSource::Path(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
                parse_dataset(&text)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn engine_config(&self) -> Result<EngineConfig<f64>, CliError> {
        Ok(EngineConfig::new(self.mode, self.threshold, self.passes)?)
    }

    fn execute(&self) -> Result<RunReport<f64>, CliError> {
        let dataset = self.load_dataset()?;
        let order = self.order.resolve(dataset.pattern_count())?;
        Ok(engine::run(&dataset, &order, &self.engine_config()?)?)
    }
}

/// Iteration-by-node value table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl OutputTable {
    pub fn from_report<S: Scalar>(report: &RunReport<S>) -> Self {
        let nodes = report.values.node_count();
        let mut header = vec!["Iteration".to_string()];
        header.extend((1..=nodes).map(|n| format!("Node {n}")));
        let rows = report
            .values
            .rows()
            .iter()
            .enumerate()
            .map(|(k, row)| {
                std::iter::once((k + 1).to_string())
                    .chain(row.iter().map(render_cell))
                    .collect()
            })
            .collect();
        Self { header, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("json encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Per-pass node value table.
pub fn run_command(spec: &RunSpec) -> Result<String, CliError> {
    if spec.trace {
        return trace_command(spec);
    }
    let table = OutputTable::from_report(&spec.execute()?);
    match spec.format {
        OutputFormat::Csv => Ok(table.to_csv()),
        OutputFormat::Json => to_json(&table),
    }
}

/// One line of the event trace: one node at one presentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceLine {
    pub pass: usize,
    pub position: usize,
    pub pattern: usize,
    pub node: usize,
    pub branch: &'static str,
    pub counted: bool,
    pub switch: &'static str,
    pub trail: &'static str,
    pub weight: String,
    /// `node:value` pairs of the cohesive map, 1-based nodes.
    pub cs: Vec<(usize, String)>,
    /// First gap cluster of the cohesive map, 1-based nodes.
    pub unit: Option<Vec<usize>>,
}

pub fn trace_lines<S: Scalar>(event: &EventOutcome<S>) -> Vec<TraceLine> {
    let cs: Vec<(usize, String)> = event
        .cs
        .iter()
        .enumerate()
        .filter_map(|(n, v)| v.map(|v| (n + 1, v.render_decimal())))
        .collect();
    let unit: Option<Vec<usize>> = event
        .cohesive_unit
        .as_ref()
        .map(|u| u.iter().map(|n| n + 1).collect());
    event
        .nodes
        .iter()
        .enumerate()
        .map(|(n, o)| TraceLine {
            pass: event.pass_index,
            position: event.position,
            pattern: event.pattern + 1,
            node: n + 1,
            branch: o.branch.as_str(),
            counted: o.counted,
            switch: o.switch_after.as_str(),
            trail: o.trail_after.as_str(),
            weight: event.weights[n].render_decimal(),
            cs: cs.clone(),
            unit: unit.clone(),
        })
        .collect()
}

pub const TRACE_HEADER: &str =
    "pass,position,pattern,node,branch,counted,switch,trail,weight,cs,unit";

impl TraceLine {
    pub fn to_csv(&self) -> String {
        let cs = self
            .cs
            .iter()
            .map(|(n, v)| format!("{n}:{v}"))
            .collect::<Vec<_>>()
            .join(";");
        let unit = match &self.unit {
            Some(u) => u.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
            None => "-".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.pass,
            self.position,
            self.pattern,
            self.node,
            self.branch,
            self.counted,
            self.switch,
            self.trail,
            self.weight,
            cs,
            unit
        )
    }
}

/// Per-event, per-node log of the run.
pub fn trace_command(spec: &RunSpec) -> Result<String, CliError> {
    let report = spec.execute()?;
    let lines: Vec<TraceLine> = report
        .passes
        .iter()
        .flat_map(|p| &p.events)
        .flat_map(trace_lines)
        .collect();
    match spec.format {
        OutputFormat::Csv => {
            let mut out = String::from(TRACE_HEADER);
            out.push('\n');
            for line in &lines {
                out.push_str(&line.to_csv());
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => to_json(&lines),
    }
}

#[derive(Serialize)]
struct SweepRow {
    order: Vec<usize>,
    upper: Vec<String>,
    true_value: Vec<String>,
    class: usize,
}

#[derive(Serialize)]
struct SweepDocument {
    rows: Vec<SweepRow>,
    classes: usize,
}

fn sweep_rows(report: &SweepReport) -> Vec<SweepRow> {
    report
        .entries
        .iter()
        .map(|e| SweepRow {
            order: e.signature.order.ids().iter().map(|p| p + 1).collect(),
            upper: e.signature.upper.iter().map(render_cell).collect(),
            true_value: e.signature.true_value.iter().map(render_cell).collect(),
            class: e.class_id + 1,
        })
        .collect()
}

/// Signature per ordering with class ids; the class count comes last.
pub fn sweep_command(spec: &RunSpec, selector: OrderingSelector) -> Result<String, CliError> {
    let dataset = spec.load_dataset()?;
    let report = metrics::sweep_orderings(&dataset, &spec.engine_config()?, selector)?;
    let rows = sweep_rows(&report);
    match spec.format {
        OutputFormat::Csv => {
            let mut out = String::from("order");
            for n in 1..=dataset.node_count() {
                let _ = write!(out, ",Node {n}");
            }
            out.push_str(",class\n");
            for row in &rows {
                let order = row
                    .order
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join("-");
                let _ = writeln!(out, "{order},{},{}", row.upper.join(","), row.class);
            }
            let _ = writeln!(out, "classes,{}", report.class_count);
            Ok(out)
        }
        OutputFormat::Json => to_json(&SweepDocument {
            rows,
            classes: report.class_count,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_spec_parsing() {
        assert_eq!(
            "identity".parse::<OrderSpec>().unwrap(),
            OrderSpec::Identity
        );
        assert_eq!(
            "reversed".parse::<OrderSpec>().unwrap(),
            OrderSpec::Reversed
        );
        assert_eq!(
            "2,1,3".parse::<OrderSpec>().unwrap(),
            OrderSpec::Explicit(vec![1, 0, 2])
        );
        assert!("0,1".parse::<OrderSpec>().is_err());
        assert!("a".parse::<OrderSpec>().is_err());
        assert!(OrderSpec::Explicit(vec![0, 0]).resolve(2).is_err());
    }

    #[test]
    fn orderings_selector_parsing() {
        assert_eq!(parse_orderings("all", 0).unwrap(), OrderingSelector::All);
        assert_eq!(
            parse_orderings("sample:12", 5).unwrap(),
            OrderingSelector::Sample { size: 12, seed: 5 }
        );
        assert!(parse_orderings("sample:x", 0).is_err());
        assert!(parse_orderings("some", 0).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::ZeroPasses).exit_code(), 1);
        assert_eq!(
            CliError::from(Error::InvariantViolation("x".into())).exit_code(),
            2
        );
    }

    #[test]
    fn run_defaults_reproduce_identity_table() {
        let out = run_command(&RunSpec::default()).unwrap();
        assert!(out.starts_with("Iteration,Node 1,Node 2,Node 3,Node 4,Node 5\n1,5,5,0,2,3\n"));
    }

    #[test]
    fn json_table_mirrors_csv() {
        let spec = RunSpec {
            format: OutputFormat::Json,
            ..RunSpec::default()
        };
        let doc: serde_json::Value = serde_json::from_str(&run_command(&spec).unwrap()).unwrap();
        assert_eq!(doc["header"][4], "Node 4");
        assert_eq!(doc["rows"][2][4], "2.666");
    }

    #[test]
    fn sweep_rejects_clear_mode() {
        let spec = RunSpec {
            mode: Mode::ClearPerPattern,
            ..RunSpec::default()
        };
        let err = sweep_command(&spec, OrderingSelector::All).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
