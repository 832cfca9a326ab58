//! Switch-feedback event dynamics.
//!
//! Each node keeps one on/off switch per pattern plus a pass-scoped trail
//! holding the feedback from its last self-determined firing. At every
//! presentation a node takes exactly one branch:
//!
//! | branch     | condition                                    | counted | switch | trail |
//! |------------|----------------------------------------------|---------|--------|-------|
//! | `Strong`   | input above threshold                        | yes     | ON     | ON    |
//! | `WeakSelf` | weak input, switch ON                        | no      | OFF    | OFF   |
//! | `Forced`   | weak input, switch OFF, trail ON, accumulate | yes     | ON     | kept  |
//! | `Idle`     | anything else                                | no      | kept   | kept  |
//!
//! Before the switches are evaluated the pattern's stored cohesive set (the
//! counted set from its previous presentation, initially every node) drives
//! the weight reinforcement and the cohesive cluster update.

mod dataset;

use std::collections::BTreeMap;

use serde::Serialize;

pub use self::dataset::{Dataset, PresentationOrder, StimulusPattern};
use crate::cohesion::{self, CsMap, NodeSet, WeightVector};
use crate::error::{Error, Result};
use crate::metrics::{CountLedger, ValueSeries};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strength {
    Strong,
    Weak,
}

/// What happens to the cohesive cluster between patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    /// The cluster carries over; earlier ON feedback can force weak nodes.
    #[default]
    Accumulate,
    /// The cluster is cleared before each pattern; no forcing.
    ClearPerPattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    Strong,
    WeakSelf,
    Forced,
    Idle,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Strong => "STRONG",
            Branch::WeakSelf => "WEAK_SELF",
            Branch::Forced => "FORCED",
            Branch::Idle => "IDLE",
        }
    }
}

impl Switch {
    pub fn as_str(self) -> &'static str {
        match self {
            Switch::On => "ON",
            Switch::Off => "OFF",
        }
    }
}

/// Strong iff `input > threshold`.
pub fn classify_signal<S: Scalar>(input: S, threshold: S) -> Result<Strength> {
    if input < S::zero() {
        return Err(Error::NegativeSignal);
    }
    Ok(if input > threshold {
        Strength::Strong
    } else {
        Strength::Weak
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig<S> {
    pub mode: Mode,
    pub threshold: S,
    pub passes: usize,
}

impl<S: Scalar> EngineConfig<S> {
    pub fn new(mode: Mode, threshold: S, passes: usize) -> Result<Self> {
        if threshold < S::zero() {
            return Err(Error::NegativeThreshold);
        }
        if passes == 0 {
            return Err(Error::ZeroPasses);
        }
        Ok(Self {
            mode,
            threshold,
            passes,
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_passes(mut self, passes: usize) -> Result<Self> {
        if passes == 0 {
            return Err(Error::ZeroPasses);
        }
        self.passes = passes;
        Ok(self)
    }
}

impl<S: Scalar> Default for EngineConfig<S> {
    fn default() -> Self {
        Self {
            mode: Mode::Accumulate,
            threshold: S::zero(),
            passes: 6,
        }
    }
}

/// Counters and switches of one node. The reinforced weight lives in the
/// simulation's [`WeightVector`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeState {
    pub global_count: u64,
    pub local_count: u64,
    pub switch_by_pattern: Vec<Switch>,
    pub trail: Switch,
}

impl NodeState {
    fn new(pattern_count: usize) -> Self {
        Self {
            global_count: 0,
            local_count: 0,
            switch_by_pattern: vec![Switch::On; pattern_count],
            trail: Switch::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeOutcome {
    pub branch: Branch,
    pub fired: bool,
    pub counted: bool,
    pub forced: bool,
    pub feedback: Option<Switch>,
    pub switch_after: Switch,
    pub trail_after: Switch,
}

/// Everything that happened at one pattern presentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventOutcome<S> {
    /// 1-based pass number.
    pub pass_index: usize,
    /// 1-based position within the pass.
    pub position: usize,
    pub pattern: usize,
    pub nodes: Vec<NodeOutcome>,
    pub counted: NodeSet,
    pub weights: Vec<S>,
    pub cs: Vec<Option<S>>,
    /// First gap cluster of the cohesive map; `None` when the map is empty.
    pub cohesive_unit: Option<NodeSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassRecord<S> {
    pub pass_index: usize,
    pub events: Vec<EventOutcome<S>>,
    pub counted_by_pattern: BTreeMap<usize, NodeSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport<S> {
    pub order: PresentationOrder,
    pub passes: Vec<PassRecord<S>>,
    pub ledger: CountLedger,
    pub values: ValueSeries,
}

#[derive(Debug, Clone)]
struct PassCursor {
    index: usize,
    presented: Vec<bool>,
    position: usize,
}

/// Exclusive state of one simulation run.
#[derive(Debug, Clone)]
pub struct Simulation<S> {
    dataset: Dataset<S>,
    config: EngineConfig<S>,
    nodes: Vec<NodeState>,
    weights: WeightVector<S>,
    cs: CsMap<S>,
    stored_sets: Vec<NodeSet>,
    ledger: CountLedger,
    cursor: Option<PassCursor>,
    completed_passes: usize,
}

impl<S: Scalar> Simulation<S> {
    pub fn new(dataset: Dataset<S>, config: EngineConfig<S>) -> Result<Self> {
        // re-validate in case the config was built by hand
        EngineConfig::new(config.mode, config.threshold, config.passes)?;
        let n = dataset.node_count();
        let p = dataset.pattern_count();
        Ok(Self {
            nodes: (0..n).map(|_| NodeState::new(p)).collect(),
            weights: WeightVector::zeros(n),
            cs: CsMap::new(n),
            stored_sets: vec![(0..n).collect(); p],
            ledger: CountLedger::new(n, p),
            cursor: None,
            completed_passes: 0,
            dataset,
            config,
        })
    }

    pub fn dataset(&self) -> &Dataset<S> {
        &self.dataset
    }

    pub fn config(&self) -> &EngineConfig<S> {
        &self.config
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn weights(&self) -> &WeightVector<S> {
        &self.weights
    }

    pub fn cs(&self) -> &CsMap<S> {
        &self.cs
    }

    pub fn stored_set(&self, pattern: usize) -> Option<&NodeSet> {
        self.stored_sets.get(pattern)
    }

    pub fn ledger(&self) -> &CountLedger {
        &self.ledger
    }

    pub fn completed_passes(&self) -> usize {
        self.completed_passes
    }

    /// Opens a new pass; every trail is reset to OFF.
    pub fn begin_pass(&mut self) -> Result<()> {
        if self.cursor.is_some() {
            return Err(Error::PassInProgress);
        }
        for node in &mut self.nodes {
            node.trail = Switch::Off;
        }
        self.cursor = Some(PassCursor {
            index: self.completed_passes + 1,
            presented: vec![false; self.dataset.pattern_count()],
            position: 0,
        });
        Ok(())
    }

    /// Presents one pattern inside the open pass.
    pub fn present_event(&mut self, pattern_id: usize) -> Result<EventOutcome<S>> {
        let cursor = self.cursor.as_mut().ok_or(Error::NoPassInProgress)?;
        let pattern = self.dataset.pattern(pattern_id)?;
        if cursor.presented[pattern_id] {
            return Err(Error::RepeatedPattern(pattern_id));
        }
        cursor.presented[pattern_id] = true;
        cursor.position += 1;
        let (pass_index, position) = (cursor.index, cursor.position);

        // weights and cohesive map follow the set stored at the previous presentation
        let stored = &self.stored_sets[pattern_id];
        if self.config.mode == Mode::ClearPerPattern {
            self.cs.clear();
        }
        cohesion::reinforce_weights(&mut self.weights, stored, pattern);
        cohesion::update_cs(&mut self.cs, stored, &self.weights);
        let cohesive_unit = cohesion::cohesive_unit(&self.cs).ok();

        let mut outcomes = Vec::with_capacity(self.nodes.len());
        let mut counted_set = NodeSet::new();
        for (n, node) in self.nodes.iter_mut().enumerate() {
            let strength = classify_signal(pattern.input(n), self.config.threshold)?;
            let switch = &mut node.switch_by_pattern[pattern_id];
            let (branch, feedback) = match strength {
                Strength::Strong => {
                    *switch = Switch::On;
                    node.trail = Switch::On;
                    (Branch::Strong, Some(Switch::On))
                }
                Strength::Weak if *switch == Switch::On => {
                    *switch = Switch::Off;
                    node.trail = Switch::Off;
                    (Branch::WeakSelf, Some(Switch::Off))
                }
                Strength::Weak
                    if self.config.mode == Mode::Accumulate && node.trail == Switch::On =>
                {
                    *switch = Switch::On;
                    (Branch::Forced, None)
                }
                Strength::Weak => (Branch::Idle, None),
            };
            let counted = matches!(branch, Branch::Strong | Branch::Forced);
            node.global_count += 1;
            if counted {
                node.local_count += 1;
                counted_set.insert(n);
            }
            outcomes.push(NodeOutcome {
                branch,
                fired: branch != Branch::Idle,
                counted,
                forced: branch == Branch::Forced,
                feedback,
                switch_after: *switch,
                trail_after: node.trail,
            });
        }
        self.stored_sets[pattern_id] = counted_set.clone();

        Ok(EventOutcome {
            pass_index,
            position,
            pattern: pattern_id,
            nodes: outcomes,
            counted: counted_set,
            weights: self.weights.as_slice().to_vec(),
            cs: (0..self.dataset.node_count())
                .map(|n| self.cs.get(n))
                .collect(),
            cohesive_unit,
        })
    }

    /// Closes the open pass, snapshots the counters and checks the count
    /// invariants.
    pub fn finish_pass(&mut self) -> Result<()> {
        let cursor = self.cursor.as_ref().ok_or(Error::NoPassInProgress)?;
        if cursor.position != self.dataset.pattern_count() {
            return Err(Error::IncompletePass {
                presented: cursor.position,
                expected: self.dataset.pattern_count(),
            });
        }
        self.cursor = None;
        self.completed_passes += 1;
        self.ledger.record_pass(&self.nodes)?;
        self.check_invariants()
    }

    pub fn check_invariants(&self) -> Result<()> {
        let expected_global = (self.completed_passes * self.dataset.pattern_count()) as u64;
        for (n, node) in self.nodes.iter().enumerate() {
            if node.local_count > node.global_count {
                return Err(Error::InvariantViolation(format!(
                    "node {n}: local count {} exceeds global count {}",
                    node.local_count, node.global_count
                )));
            }
            if self.cursor.is_none() && node.global_count != expected_global {
                return Err(Error::InvariantViolation(format!(
                    "node {n}: global count {} after {} passes, expected {expected_global}",
                    node.global_count, self.completed_passes
                )));
            }
        }
        Ok(())
    }

    /// Runs one full pass in `order`.
    pub fn run_pass(&mut self, order: &PresentationOrder) -> Result<PassRecord<S>> {
        if order.len() != self.dataset.pattern_count() {
            return Err(Error::InvalidOrder(format!(
                "order has {} entries for {} patterns",
                order.len(),
                self.dataset.pattern_count()
            )));
        }
        self.begin_pass()?;
        let mut events = Vec::with_capacity(order.len());
        let mut counted_by_pattern = BTreeMap::new();
        for &p in order.ids() {
            let event = self.present_event(p)?;
            counted_by_pattern.insert(p, event.counted.clone());
            events.push(event);
        }
        let pass_index = self.completed_passes + 1;
        self.finish_pass()?;
        Ok(PassRecord {
            pass_index,
            events,
            counted_by_pattern,
        })
    }
}

/// Runs `config.passes` passes of `dataset` in `order`.
pub fn run<S: Scalar>(
    dataset: &Dataset<S>,
    order: &PresentationOrder,
    config: &EngineConfig<S>,
) -> Result<RunReport<S>> {
    let order = PresentationOrder::new(order.ids().to_vec(), dataset.pattern_count())?;
    let mut sim = Simulation::new(dataset.clone(), *config)?;
    let passes = (0..config.passes)
        .map(|_| sim.run_pass(&order))
        .collect::<Result<Vec<_>>>()?;
    let values = ValueSeries::from_ledger(sim.ledger())?;
    Ok(RunReport {
        order,
        passes,
        ledger: sim.ledger().clone(),
        values,
    })
}
