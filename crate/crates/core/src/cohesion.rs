//! Reinforced weights, the accumulated node-value cohesive cluster, and the
//! descending-sort gap clustering that extracts a pattern's cohesive unit.
//!
//! The clustering rule: sort values in descending order and compute the
//! adjacent gaps `g_i = v_i - v_{i+1}`. The pair `(i, i+1)` is linked when
//! `g_i` is no larger than either neighbouring gap (missing neighbours count
//! as infinite), i.e. each value joins the neighbour it is closest to.
//! Clusters are the maximal linked runs, highest values first.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::StimulusPattern;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Set of node ids (0-based).
pub type NodeSet = BTreeSet<usize>;

/// Per-node reinforced weight. Inputs are non-negative, so every entry is
/// non-decreasing over a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector<S>(Vec<S>);

impl<S: Scalar> WeightVector<S> {
    pub fn zeros(node_count: usize) -> Self {
        Self(vec![S::zero(); node_count])
    }

    pub fn get(&self, node: usize) -> S {
        self.0[node]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Partial map node -> value. Absent entries were never written.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsMap<S>(Vec<Option<S>>);

impl<S: Scalar> CsMap<S> {
    pub fn new(node_count: usize) -> Self {
        Self(vec![None; node_count])
    }

    pub fn get(&self, node: usize) -> Option<S> {
        self.0.get(node).copied().flatten()
    }

    pub fn set(&mut self, node: usize, value: S) {
        self.0[node] = Some(value);
    }

    pub fn clear(&mut self) {
        self.0.iter_mut().for_each(|e| *e = None);
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    /// Present entries in node order.
    pub fn entries(&self) -> Vec<(usize, S)> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(n, v)| v.map(|v| (n, v)))
            .collect()
    }
}

/// A contiguous block of the descending value ordering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster<S> {
    pub members: Vec<usize>,
    pub values: Vec<S>,
}

impl<S> Cluster<S> {
    pub fn member_set(&self) -> NodeSet {
        self.members.iter().copied().collect()
    }
}

/// Adds the pattern's input to the weight of every node in `stored`.
///
/// `stored` is the cohesive set remembered from the pattern's previous
/// presentation. Zero inputs leave the weight untouched.
pub fn reinforce_weights<S: Scalar>(
    weights: &mut WeightVector<S>,
    stored: &NodeSet,
    pattern: &StimulusPattern<S>,
) {
    for &n in stored {
        weights.0[n] = weights.0[n] + pattern.input(n);
    }
}

/// Writes the current weight of every node in `stored` into `cs`; other
/// entries keep their earlier value.
pub fn update_cs<S: Scalar>(cs: &mut CsMap<S>, stored: &NodeSet, weights: &WeightVector<S>) {
    for &n in stored {
        cs.set(n, weights.get(n));
    }
}

fn descending<S: Scalar>(a: &(usize, S), b: &(usize, S)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.cmp(&b.0))
}

/// Partitions `(node, value)` entries into gap-linked clusters, highest
/// values first. Ties in value are ordered by node id.
pub fn cluster_descending<S: Scalar>(values: &[(usize, S)]) -> Result<Vec<Cluster<S>>> {
    if values.is_empty() {
        return Err(Error::EmptyClusterInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(descending);

    let gaps: Vec<S> = sorted.windows(2).map(|w| w[0].1 - w[1].1).collect();
    let linked = |i: usize| {
        let g = gaps[i];
        let left_ok = i == 0 || g <= gaps[i - 1];
        let right_ok = i + 1 >= gaps.len() || g <= gaps[i + 1];
        left_ok && right_ok
    };

    let mut clusters = Vec::new();
    let mut current = Cluster {
        members: vec![sorted[0].0],
        values: vec![sorted[0].1],
    };
    for (i, &(node, value)) in sorted.iter().enumerate().skip(1) {
        if !linked(i - 1) {
            clusters.push(std::mem::replace(
                &mut current,
                Cluster {
                    members: Vec::new(),
                    values: Vec::new(),
                },
            ));
        }
        current.members.push(node);
        current.values.push(value);
    }
    clusters.push(current);
    Ok(clusters)
}

/// Member set of the highest-value cluster of `cs`.
pub fn cohesive_unit<S: Scalar>(cs: &CsMap<S>) -> Result<NodeSet> {
    let clusters = cluster_descending(&cs.entries())?;
    Ok(clusters[0].member_set())
}
