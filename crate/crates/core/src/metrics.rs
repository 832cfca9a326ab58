//! Count ledgers, exact per-pass node values, oscillation summaries and
//! ordering signatures.
//!
//! For a binary dataset in accumulate mode the counted set of a pattern `P`
//! alternates between two sets:
//!
//! * odd passes: `S_true(P)`, the nodes with a strong input for `P`;
//! * even passes: `S_max(P)`, which additionally holds every weak node that
//!   had a strong input for some pattern earlier in the order.
//!
//! With `T(n)` and `M(n)` the number of patterns whose true/max set holds
//! `n`, the node value is `(T + M) / 2` on every even pass and
//! `(T + m (T + M)) / (2m + 1)` on pass `2m + 1`.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohesion::NodeSet;
use crate::engine::{self, Dataset, EngineConfig, Mode, NodeState, PresentationOrder};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

/// Exhaustive sweeps are refused above this many patterns (9! orderings).
pub const MAX_EXHAUSTIVE_PATTERNS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountSnapshot {
    pub global: u64,
    pub local: u64,
}

/// Cumulative global/local counts per node, snapshotted after every pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountLedger {
    node_count: usize,
    pattern_count: usize,
    snapshots: Vec<Vec<CountSnapshot>>,
}

impl CountLedger {
    pub fn new(node_count: usize, pattern_count: usize) -> Self {
        Self {
            node_count,
            pattern_count,
            snapshots: Vec::new(),
        }
    }

    pub(crate) fn record_pass(&mut self, nodes: &[NodeState]) -> Result<()> {
        let row: Vec<CountSnapshot> = nodes
            .iter()
            .map(|n| CountSnapshot {
                global: n.global_count,
                local: n.local_count,
            })
            .collect();
        if let Some(prev) = self.snapshots.last() {
            let decreasing = prev
                .iter()
                .zip(&row)
                .any(|(a, b)| b.global < a.global || b.local < a.local);
            if decreasing {
                return Err(Error::InvariantViolation(
                    "cumulative counts decreased".into(),
                ));
            }
        }
        self.snapshots.push(row);
        Ok(())
    }

    pub fn passes(&self) -> usize {
        self.snapshots.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_count
    }

    /// Counts of `node` after `pass` (1-based).
    pub fn snapshot(&self, node: usize, pass: usize) -> Result<CountSnapshot> {
        if pass == 0 || pass > self.snapshots.len() {
            return Err(Error::PassOutOfRange {
                pass,
                available: self.snapshots.len(),
            });
        }
        self.snapshots[pass - 1]
            .get(node)
            .copied()
            .ok_or(Error::UnknownNode(node))
    }
}

fn ratio(numer: u64, denom: usize) -> Rational {
    Rational::new(numer as i64, denom as i64)
}

/// Cumulative local count divided by the pass number.
pub fn node_value(ledger: &CountLedger, node: usize, pass: usize) -> Result<Rational> {
    Ok(ratio(ledger.snapshot(node, pass)?.local, pass))
}

/// Cumulative global count divided by the pass number; equals the pattern
/// count whenever every pass was complete.
pub fn global_value(ledger: &CountLedger, node: usize, pass: usize) -> Result<Rational> {
    Ok(ratio(ledger.snapshot(node, pass)?.global, pass))
}

/// Per-pass node values and energies of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueSeries {
    pattern_count: usize,
    /// `values[k - 1][n]` is the value of node `n` after pass `k`.
    values: Vec<Vec<Rational>>,
    energy: Vec<Rational>,
}

impl ValueSeries {
    pub fn from_ledger(ledger: &CountLedger) -> Result<Self> {
        let values = (1..=ledger.passes())
            .map(|k| {
                (0..ledger.node_count())
                    .map(|n| node_value(ledger, n, k))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_values(ledger.pattern_count(), values))
    }

    /// Builds a series from explicit per-pass rows.
    pub fn from_values(pattern_count: usize, values: Vec<Vec<Rational>>) -> Self {
        let energy = values.iter().map(|row| mean(row)).collect();
        Self {
            pattern_count,
            values,
            energy,
        }
    }

    pub fn passes(&self) -> usize {
        self.values.len()
    }

    pub fn node_count(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_count
    }

    /// Row of node values after `pass` (1-based).
    pub fn row(&self, pass: usize) -> Result<&[Rational]> {
        self.values
            .get(pass.wrapping_sub(1))
            .map(Vec::as_slice)
            .ok_or(Error::PassOutOfRange {
                pass,
                available: self.values.len(),
            })
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.values
    }

    /// Value of `node` on every pass, in order.
    pub fn node_series(&self, node: usize) -> Vec<Rational> {
        self.values.iter().map(|row| row[node]).collect()
    }
}

fn mean(row: &[Rational]) -> Rational {
    if row.is_empty() {
        return Rational::zero();
    }
    row.iter().sum::<Rational>() / Rational::from_integer(row.len() as i64)
}

/// Arithmetic mean of the node values after `pass`.
pub fn energy_value(series: &ValueSeries, pass: usize) -> Result<Rational> {
    series.row(pass)?;
    Ok(series.energy[pass - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_pass(pass: usize) -> Self {
        if pass % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

fn require_binary<S: Scalar>(dataset: &Dataset<S>) -> Result<()> {
    if dataset.is_binary() {
        Ok(())
    } else {
        Err(Error::NonBinaryDataset)
    }
}

/// Predicted counted set of `pattern` without running the engine.
pub fn closed_form_counted_set<S: Scalar>(
    dataset: &Dataset<S>,
    order: &PresentationOrder,
    pattern: usize,
    parity: Parity,
) -> Result<NodeSet> {
    require_binary(dataset)?;
    let pos = order
        .ids()
        .iter()
        .position(|&p| p == pattern)
        .ok_or(Error::UnknownPattern(pattern))?;
    let strong = |p: usize, n: usize| dataset.patterns()[p].inputs[n].is_one();
    let earlier = &order.ids()[..pos];
    Ok((0..dataset.node_count())
        .filter(|&n| {
            strong(pattern, n) || (parity == Parity::Even && earlier.iter().any(|&q| strong(q, n)))
        })
        .collect())
}

/// Per-node `(T, M)` membership counts over all patterns.
pub fn closed_form_membership<S: Scalar>(
    dataset: &Dataset<S>,
    order: &PresentationOrder,
) -> Result<Vec<(u64, u64)>> {
    let mut counts = vec![(0_u64, 0_u64); dataset.node_count()];
    for &p in order.ids() {
        for n in closed_form_counted_set(dataset, order, p, Parity::Odd)? {
            counts[n].0 += 1;
        }
        for n in closed_form_counted_set(dataset, order, p, Parity::Even)? {
            counts[n].1 += 1;
        }
    }
    Ok(counts)
}

/// Predicted node value after `pass` from the membership counts.
pub fn closed_form_value(true_count: u64, max_count: u64, pass: usize) -> Rational {
    let t = true_count as i64;
    let sum = (true_count + max_count) as i64;
    let k = pass as i64;
    if pass.is_multiple_of(2) {
        Rational::new(sum, 2)
    } else {
        let m = (k - 1) / 2;
        Rational::new(t + m * sum, k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeOscillation {
    /// Common even-pass value; `None` if even passes disagree.
    pub upper: Option<Rational>,
    /// Values on passes 1, 3, 5, ...
    pub lower_series: Vec<Rational>,
    /// `upper - lower` per odd pass; empty when `upper` is `None`.
    pub gap_series: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationSummary {
    pub nodes: Vec<NodeOscillation>,
    pub oscillating: bool,
    pub global_bound: Rational,
}

/// Splits every node's value series by pass parity.
pub fn oscillation_summary(series: &ValueSeries) -> Result<OscillationSummary> {
    if series.passes() < 4 {
        return Err(Error::TooFewPasses {
            passes: series.passes(),
            required: 4,
        });
    }
    let nodes: Vec<NodeOscillation> = (0..series.node_count())
        .map(|n| {
            let values = series.node_series(n);
            let even: Vec<Rational> = values.iter().skip(1).step_by(2).copied().collect();
            let lower_series: Vec<Rational> = values.iter().step_by(2).copied().collect();
            let upper = even.iter().all_equal_value().ok().copied();
            let gap_series = upper
                .map(|u| lower_series.iter().map(|l| u - l).collect())
                .unwrap_or_default();
            NodeOscillation {
                upper,
                lower_series,
                gap_series,
            }
        })
        .collect();
    let all_constant = nodes.iter().all(|n| n.upper.is_some());
    let any_gap = nodes
        .iter()
        .any(|n| n.gap_series.iter().any(|g| !g.is_zero()));
    Ok(OscillationSummary {
        nodes,
        oscillating: all_constant && any_gap,
        global_bound: Rational::from_integer(series.pattern_count() as i64),
    })
}

/// Per-node upper and true values identifying a presentation order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrderSignature {
    pub order: PresentationOrder,
    pub upper: Vec<Rational>,
    pub true_value: Vec<Rational>,
}

impl OrderSignature {
    /// The part of the signature that ignores which order produced it.
    pub fn key(&self) -> (&[Rational], &[Rational]) {
        (&self.upper, &self.true_value)
    }
}

/// Runs two passes of the engine and reads the signature off them: pass 1
/// gives the true values, pass 2 the upper values.
pub fn signature<S: Scalar>(
    dataset: &Dataset<S>,
    order: &PresentationOrder,
    config: &EngineConfig<S>,
) -> Result<OrderSignature> {
    if config.mode != Mode::Accumulate {
        return Err(Error::AccumulateModeRequired);
    }
    let config = config.with_passes(2)?;
    let report = engine::run(dataset, order, &config)?;
    Ok(OrderSignature {
        order: report.order,
        upper: report.values.row(2)?.to_vec(),
        true_value: report.values.row(1)?.to_vec(),
    })
}

/// Signature from the membership counts alone (binary datasets only).
pub fn closed_form_signature<S: Scalar>(
    dataset: &Dataset<S>,
    order: &PresentationOrder,
) -> Result<OrderSignature> {
    let counts = closed_form_membership(dataset, order)?;
    Ok(OrderSignature {
        order: order.clone(),
        upper: counts
            .iter()
            .map(|&(t, m)| closed_form_value(t, m, 2))
            .collect(),
        true_value: counts
            .iter()
            .map(|&(t, _)| Rational::from(t as i64))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingSelector {
    All,
    Sample { size: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub signature: OrderSignature,
    pub class_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    /// Entries in lexicographic order of their orderings.
    pub entries: Vec<SweepEntry>,
    pub class_count: usize,
}

fn select_orderings(pattern_count: usize, selector: OrderingSelector) -> Result<Vec<Vec<usize>>> {
    match selector {
        OrderingSelector::All => {
            if pattern_count > MAX_EXHAUSTIVE_PATTERNS {
                return Err(Error::TooManyOrderings {
                    patterns: pattern_count,
                    max: MAX_EXHAUSTIVE_PATTERNS,
                });
            }
            Ok((0..pattern_count).permutations(pattern_count).collect())
        }
        OrderingSelector::Sample { size, seed } => {
            if size == 0 {
                return Err(Error::EmptySample);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = BTreeSet::new();
            let mut order: Vec<usize> = (0..pattern_count).collect();
            for _ in 0..size {
                order.shuffle(&mut rng);
                picked.insert(order.clone());
            }
            Ok(picked.into_iter().collect())
        }
    }
}

/// Computes a signature per ordering and groups equal signatures into
/// classes. Class ids follow first appearance in lexicographic order.
pub fn sweep_orderings<S: Scalar>(
    dataset: &Dataset<S>,
    config: &EngineConfig<S>,
    selector: OrderingSelector,
) -> Result<SweepReport> {
    if config.mode != Mode::Accumulate {
        return Err(Error::AccumulateModeRequired);
    }
    let orders = select_orderings(dataset.pattern_count(), selector)?;
    sweep_explicit(
        dataset,
        config,
        orders
            .into_iter()
            .map(|o| PresentationOrder::new(o, dataset.pattern_count()))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Same as [`sweep_orderings`] over a caller-supplied set of orderings.
pub fn sweep_explicit<S: Scalar>(
    dataset: &Dataset<S>,
    config: &EngineConfig<S>,
    mut orders: Vec<PresentationOrder>,
) -> Result<SweepReport> {
    if config.mode != Mode::Accumulate {
        return Err(Error::AccumulateModeRequired);
    }
    orders.sort();
    orders.dedup();
    let signatures = orders
        .par_iter()
        .map(|o| signature(dataset, o, config))
        .collect::<Result<Vec<_>>>()?;

    let mut classes: HashMap<(Vec<Rational>, Vec<Rational>), usize> = HashMap::new();
    let entries: Vec<SweepEntry> = signatures
        .into_iter()
        .map(|signature| {
            let next = classes.len();
            let class_id = *classes
                .entry((signature.upper.clone(), signature.true_value.clone()))
                .or_insert(next);
            SweepEntry {
                signature,
                class_id,
            }
        })
        .collect();
    Ok(SweepReport {
        entries,
        class_count: classes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn fig2_run(order: PresentationOrder, mode: Mode) -> engine::RunReport<f64> {
        let cfg = EngineConfig::default().with_mode(mode);
        engine::run(&datasets::fig2(), &order, &cfg).unwrap()
    }

    #[test]
    fn node_and_global_values() {
        let report = fig2_run(PresentationOrder::identity(5), Mode::Accumulate);
        assert_eq!(node_value(&report.ledger, 3, 3).unwrap(), r(8, 3));
        for k in 1..=6 {
            assert_eq!(node_value(&report.ledger, 0, k).unwrap(), r(5, 1));
            assert_eq!(node_value(&report.ledger, 2, k).unwrap(), r(0, 1));
            assert_eq!(global_value(&report.ledger, 4, k).unwrap(), r(5, 1));
        }
        assert!(matches!(
            node_value(&report.ledger, 0, 7),
            Err(Error::PassOutOfRange { .. })
        ));
        assert!(node_value(&report.ledger, 0, 0).is_err());
        assert_eq!(
            node_value(&report.ledger, 9, 1).unwrap_err(),
            Error::UnknownNode(9)
        );
    }

    #[test]
    fn global_value_matches_pattern_count() {
        let ds = Dataset::from_rows(vec![vec![1.0], vec![0.0], vec![1.0]]).unwrap();
        let report = engine::run(
            &ds,
            &PresentationOrder::identity(3),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(global_value(&report.ledger, 0, 4).unwrap(), r(3, 1));
    }

    #[test]
    fn energy_examples() {
        let s = ValueSeries::from_values(
            5,
            vec![
                [5, 5, 0, 2, 3].map(Rational::from_integer).to_vec(),
                [5, 5, 0, 3, 4].map(Rational::from_integer).to_vec(),
            ],
        );
        assert_eq!(energy_value(&s, 1).unwrap(), r(3, 1));
        assert_eq!(energy_value(&s, 2).unwrap(), r(17, 5));
        assert!(energy_value(&s, 3).is_err());

        let zero = Dataset::from_rows(vec![vec![0.0, 0.0]; 2]).unwrap();
        let report = engine::run(
            &zero,
            &PresentationOrder::identity(2),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(energy_value(&report.values, 6).unwrap(), Rational::zero());
    }

    #[test]
    fn closed_form_sets_on_fig2() {
        let ds = datasets::fig2::<f64>();
        let id = PresentationOrder::identity(5);
        let set = |p, parity| closed_form_counted_set(&ds, &id, p, parity).unwrap();
        assert_eq!(set(3, Parity::Even), [0, 1, 3, 4].into_iter().collect());
        assert_eq!(set(0, Parity::Even), [0, 1, 4].into_iter().collect());
        assert_eq!(set(3, Parity::Odd), [0, 1].into_iter().collect());
        assert_eq!(set(1, Parity::Odd), [0, 1, 3].into_iter().collect());
    }

    #[test]
    fn closed_form_rejects_graded_data() {
        let ds = Dataset::from_rows(vec![vec![0.5, 1.0]]).unwrap();
        assert_eq!(
            closed_form_counted_set(&ds, &PresentationOrder::identity(1), 0, Parity::Odd)
                .unwrap_err(),
            Error::NonBinaryDataset
        );
    }

    #[test]
    fn oscillation_on_fig2() {
        let report = fig2_run(PresentationOrder::identity(5), Mode::Accumulate);
        let s = oscillation_summary(&report.values).unwrap();
        assert!(s.oscillating);
        assert_eq!(s.global_bound, r(5, 1));
        assert_eq!(s.nodes[3].upper, Some(r(3, 1)));
        assert_eq!(s.nodes[3].lower_series, vec![r(2, 1), r(8, 3), r(14, 5)]);
        assert_eq!(s.nodes[3].gap_series, vec![r(1, 1), r(1, 3), r(1, 5)]);

        let clear = fig2_run(PresentationOrder::identity(5), Mode::ClearPerPattern);
        let s = oscillation_summary(&clear.values).unwrap();
        assert!(!s.oscillating);
        assert!(s
            .nodes
            .iter()
            .flat_map(|n| &n.gap_series)
            .all(Zero::is_zero));

        let rev = fig2_run(PresentationOrder::reversed(5), Mode::Accumulate);
        let s = oscillation_summary(&rev.values).unwrap();
        assert_eq!(s.nodes[3].upper, Some(r(5, 2)));
    }

    #[test]
    fn oscillation_needs_four_passes() {
        let cfg = EngineConfig::default().with_passes(3).unwrap();
        let report = engine::run(
            &datasets::fig2::<f64>(),
            &PresentationOrder::identity(5),
            &cfg,
        )
        .unwrap();
        assert_eq!(
            oscillation_summary(&report.values).unwrap_err(),
            Error::TooFewPasses {
                passes: 3,
                required: 4
            }
        );
    }

    #[test]
    fn signatures_distinguish_fig2_orders() {
        let ds = datasets::fig2::<f64>();
        let cfg = EngineConfig::default();
        let id = signature(&ds, &PresentationOrder::identity(5), &cfg).unwrap();
        let rev = signature(&ds, &PresentationOrder::reversed(5), &cfg).unwrap();
        assert_eq!(
            id.upper,
            [5, 5, 0, 3, 4].map(Rational::from_integer).to_vec()
        );
        assert_eq!(rev.upper, vec![r(5, 1), r(5, 1), r(0, 1), r(5, 2), r(4, 1)]);
        assert_eq!(id.true_value, rev.true_value);
        assert_ne!(id.key(), rev.key());

        let clear = cfg.with_mode(Mode::ClearPerPattern);
        assert_eq!(
            signature(&ds, &PresentationOrder::identity(5), &clear).unwrap_err(),
            Error::AccumulateModeRequired
        );
    }

    #[test]
    fn sweep_small_cases() {
        let cfg = EngineConfig::default();
        let ds = datasets::fig2::<f64>();
        let report = sweep_explicit(
            &ds,
            &cfg,
            vec![
                PresentationOrder::identity(5),
                PresentationOrder::reversed(5),
            ],
        )
        .unwrap();
        assert_eq!(report.class_count, 2);

        let same = Dataset::from_rows(vec![vec![1.0, 0.0, 1.0]; 4]).unwrap();
        let report = sweep_orderings(&same, &cfg, OrderingSelector::All).unwrap();
        assert_eq!(report.entries.len(), 24);
        assert_eq!(report.class_count, 1);

        let pair = Dataset::from_rows(vec![vec![1.0], vec![0.0]]).unwrap();
        let report = sweep_orderings(&pair, &cfg, OrderingSelector::All).unwrap();
        let uppers: Vec<Rational> = report
            .entries
            .iter()
            .map(|e| e.signature.upper[0])
            .collect();
        // strong-first: T = 1, M = 2; weak-first: T = 1, M = 1
        assert_eq!(uppers, vec![r(3, 2), r(1, 1)]);
        assert_eq!(report.class_count, 2);

        assert_eq!(
            sweep_orderings(&ds, &cfg, OrderingSelector::Sample { size: 0, seed: 1 }).unwrap_err(),
            Error::EmptySample
        );
    }

    #[test]
    fn sampled_sweep_is_deterministic() {
        let ds = datasets::fig2::<f64>();
        let cfg = EngineConfig::default();
        let sel = OrderingSelector::Sample { size: 30, seed: 7 };
        let a = sweep_orderings(&ds, &cfg, sel).unwrap();
        let b = sweep_orderings(&ds, &cfg, sel).unwrap();
        assert_eq!(a, b);
        let orders: Vec<_> = a
            .entries
            .iter()
            .map(|e| e.signature.order.clone())
            .collect();
        assert!(orders.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn closed_form_value_formula() {
        // node 4 of fig2: T = 2, M = 4
        assert_eq!(closed_form_value(2, 4, 1), r(2, 1));
        assert_eq!(closed_form_value(2, 4, 3), r(8, 3));
        assert_eq!(closed_form_value(2, 4, 5), r(14, 5));
        assert_eq!(closed_form_value(2, 4, 6), r(3, 1));
    }
}
