//! Oblivious decision trees.
//!
//! Every level applies one predicate `value > threshold` to all nodes, so the
//! leaf of an example is the bit vector of its level predicates:
//! `leaf = sum over levels of 2^level * [value > threshold]`.

use serde::{Deserialize, Serialize};

use crate::dataset::BorderSet;
use crate::error::{Error, Result};

/// What a split reads: a numerical feature or a target-statistic source
/// (a categorical feature or a combination of them).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSource {
    Numeric { feature: u32 },
    Ts { source: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitAttribute {
    pub source: SplitSource,
    pub threshold: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObliviousTree {
    splits: Vec<SplitAttribute>,
}

impl ObliviousTree {
    pub const MAX_DEPTH: usize = 16;

    pub fn new(splits: Vec<SplitAttribute>) -> Result<Self> {
        if splits.len() > Self::MAX_DEPTH {
            return Err(Error::invalid(format!("tree depth {} exceeds {}", splits.len(), Self::MAX_DEPTH)));
        }
        if splits.iter().any(|s| !s.threshold.is_finite()) {
            return Err(Error::invalid("split thresholds must be finite"));
        }
        Ok(Self { splits })
    }

    pub fn depth(&self) -> usize {
        self.splits.len()
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.splits.len()
    }

    pub fn splits(&self) -> &[SplitAttribute] {
        &self.splits
    }
}

/// One value per leaf of a tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafValues(Vec<f64>);

impl LeafValues {
    pub fn new(tree: &ObliviousTree, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.leaf_count() {
            return Err(Error::Model(format!(
                "{} leaf values for a tree with {} leaves",
                values.len(),
                tree.leaf_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("leaf values must be finite".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// How target statistics are resolved while routing an example.
#[derive(Clone, Copy, Debug)]
pub enum TsContext<'a> {
    /// Training encodings under one permutation: `columns[source][row]`.
    Permutation { columns: &'a [&'a [f64]], row: usize },
    /// Values computed from full-data tables, one per source.
    Apply(&'a [f64]),
}

impl TsContext<'_> {
    fn value(&self, source: u32) -> Result<f64> {
        let s = source as usize;
        let v = match self {
            TsContext::Permutation { columns, row } => columns.get(s).and_then(|c| c.get(*row)),
            TsContext::Apply(values) => values.get(s),
        };
        v.copied()
            .ok_or_else(|| Error::Model(format!("no target statistic for source {source}")))
    }
}

pub fn split_value(split: &SplitAttribute, numeric: &[f64], ts: &TsContext<'_>) -> Result<f64> {
    match split.source {
        SplitSource::Numeric { feature } => numeric
            .get(feature as usize)
            .copied()
            .ok_or_else(|| Error::Model(format!("numerical feature {feature} out of range"))),
        SplitSource::Ts { source } => ts.value(source),
    }
}

pub fn get_leaf(tree: &ObliviousTree, numeric: &[f64], ts: &TsContext<'_>) -> Result<usize> {
    let mut leaf = 0;
    for (level, split) in tree.splits.iter().enumerate() {
        if split_value(split, numeric, ts)? > split.threshold {
            leaf |= 1 << level;
        }
    }
    Ok(leaf)
}

pub fn apply(tree: &ObliviousTree, leaf_values: &LeafValues, numeric: &[f64], ts: &TsContext<'_>) -> Result<f64> {
    if leaf_values.0.len() != tree.leaf_count() {
        return Err(Error::Model("leaf values do not match tree".into()));
    }
    Ok(leaf_values.0[get_leaf(tree, numeric, ts)?])
}

/// A column that can be split on, with its candidate thresholds.
#[derive(Clone, Copy, Debug)]
pub struct CandidateColumn<'a> {
    pub source: SplitSource,
    pub borders: &'a BorderSet,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    /// Position of the column in the enumeration order.
    pub column: usize,
    pub border: usize,
    pub split: SplitAttribute,
}

/// One candidate per (column, border), in column then border order.
pub fn enumerate_candidates(columns: &[CandidateColumn<'_>]) -> Vec<Candidate> {
    columns
        .iter()
        .enumerate()
        .flat_map(|(column, c)| {
            c.borders.borders().iter().enumerate().map(move |(border, &threshold)| Candidate {
                column,
                border,
                split: SplitAttribute {
                    source: c.source,
                    threshold,
                },
            })
        })
        .collect()
}
