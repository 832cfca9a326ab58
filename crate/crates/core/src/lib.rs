//! Switch-feedback neuron simulator.
//!
//! Every node keeps an on/off switch per stimulus pattern. A strong input
//! switches the node on for that pattern; a weak input switches it off,
//! unless the switch is already off, in which case the ON feedback left by
//! an earlier pattern in the same pass forces the node to fire. Repeating
//! the sequence makes each node's averaged count oscillate between an upper
//! bound (the most enclosing firing sets) and the actual firing sets.
//!
//! The engine is generic over the [`Scalar`] used for signal strengths and
//! weights; reported node values are always exact [`Rational`]s.
//!
//! ```
//! use sigdiff::{datasets, engine, io::render_cell, EngineConfig, PresentationOrder};
//!
//! let ds = datasets::fig2::<f64>();
//! let report = engine::run(&ds, &PresentationOrder::identity(5), &EngineConfig::default()).unwrap();
//! let row: Vec<String> = report.values.row(3).unwrap().iter().map(render_cell).collect();
//! assert_eq!(row, ["5", "5", "0", "2.666", "3.666"]);
//! ```

pub mod cohesion;
pub mod datasets;
pub mod engine;
mod error;
pub mod io;
pub mod metrics;
mod scalar;

pub use crate::engine::{
    Branch, Dataset, EngineConfig, EventOutcome, Mode, PassRecord, PresentationOrder, RunReport,
    Simulation, StimulusPattern, Switch,
};
pub use crate::error::{Error, Result};
pub use crate::scalar::Scalar;

/// Exact rational used for node values and, optionally, as a scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type DatasetF64 = Dataset<f64>;
pub type DatasetF32 = Dataset<f32>;
pub type DatasetExact = Dataset<Rational>;

pub type SimulationF64 = Simulation<f64>;
pub type SimulationF32 = Simulation<f32>;
pub type SimulationExact = Simulation<Rational>;

pub type EngineConfigF64 = EngineConfig<f64>;
pub type EngineConfigExact = EngineConfig<Rational>;
