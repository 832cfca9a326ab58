//! Built-in datasets.

use crate::engine::Dataset;
use crate::io::parse_dataset;
use crate::scalar::Scalar;

/// Five binary patterns over five nodes.
pub const FIG2_TEXT: &str = include_str!("../data/fig2.txt");

/// One node shared by two patterns: strong, then weak.
pub const DEMO_TEXT: &str = include_str!("../data/demo.txt");

pub fn fig2<S: Scalar>() -> Dataset<S> {
    parse_dataset(FIG2_TEXT).expect("bundled dataset parses")
}

pub fn two_pattern_demo<S: Scalar>() -> Dataset<S> {
    parse_dataset(DEMO_TEXT).expect("bundled dataset parses")
}

pub fn builtin_names() -> &'static [&'static str] {
    &["fig2", "demo"]
}

pub fn builtin(name: &str) -> Option<Dataset<f64>> {
    match name {
        "fig2" => Some(fig2()),
        "demo" => Some(two_pattern_demo()),
        _ => None,
    }
}
