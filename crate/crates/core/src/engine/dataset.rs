use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One stimulus pattern: the input strength presented to every node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StimulusPattern<S> {
    pub id: usize,
    pub inputs: Vec<S>,
}

impl<S: Scalar> StimulusPattern<S> {
    pub fn input(&self, node: usize) -> S {
        self.inputs[node]
    }
}

/// An ordered list of equally sized stimulus patterns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset<S> {
    patterns: Vec<StimulusPattern<S>>,
    node_count: usize,
}

impl<S: Scalar> Dataset<S> {
    /// Builds a dataset from raw rows, assigning pattern ids by position.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let node_count = first.len();
        if node_count == 0 {
            return Err(Error::NoNodes);
        }
        let mut patterns = Vec::with_capacity(rows.len());
        for (id, inputs) in rows.into_iter().enumerate() {
            if inputs.len() != node_count {
                return Err(Error::RaggedPattern {
                    pattern: id,
                    expected: node_count,
                    found: inputs.len(),
                });
            }
            if let Some(node) = inputs.iter().position(|v| *v < S::zero()) {
                return Err(Error::NegativeInput { pattern: id, node });
            }
            patterns.push(StimulusPattern { id, inputs });
        }
        Ok(Self {
            patterns,
            node_count,
        })
    }

    pub fn patterns(&self) -> &[StimulusPattern<S>] {
        &self.patterns
    }

    pub fn pattern(&self, id: usize) -> Result<&StimulusPattern<S>> {
        self.patterns.get(id).ok_or(Error::UnknownPattern(id))
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn is_binary(&self) -> bool {
        self.patterns
            .iter()
            .all(|p| p.inputs.iter().all(Scalar::is_binary))
    }

    /// Converts every input with `f`, keeping the shape.
    pub fn map<T: Scalar>(&self, mut f: impl FnMut(S) -> T) -> Result<Dataset<T>> {
        Dataset::from_rows(
            self.patterns
                .iter()
                .map(|p| p.inputs.iter().map(|v| f(*v)).collect())
                .collect(),
        )
    }
}

/// A permutation of pattern ids giving the presentation order of one pass.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PresentationOrder(Vec<usize>);

impl PresentationOrder {
    /// Validates that `order` is a bijection over `0..pattern_count`.
    pub fn new(order: Vec<usize>, pattern_count: usize) -> Result<Self> {
        if order.len() != pattern_count {
            return Err(Error::InvalidOrder(format!(
                "expected {pattern_count} entries, got {}",
                order.len()
            )));
        }
        let mut seen = vec![false; pattern_count];
        for &id in &order {
            match seen.get_mut(id) {
                None => return Err(Error::InvalidOrder(format!("pattern id {id} out of range"))),
                Some(true) => return Err(Error::InvalidOrder(format!("pattern id {id} repeated"))),
                Some(s) => *s = true,
            }
        }
        Ok(Self(order))
    }

    pub fn identity(pattern_count: usize) -> Self {
        Self((0..pattern_count).collect())
    }

    pub fn reversed(pattern_count: usize) -> Self {
        Self((0..pattern_count).rev().collect())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
