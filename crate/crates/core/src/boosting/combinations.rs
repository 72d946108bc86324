//! Categorical feature combinations.
//!
//! A target-statistic source is a sorted set of categorical features: a
//! single feature or a combination. Combination categories are the tuples of
//! member category ids, interned in order of first appearance.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Sources in registration order; singletons come first, one per feature.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceRegistry {
    sources: Vec<Vec<u32>>,
    #[serde(skip)]
    index: HashMap<Vec<u32>, u32>,
}

impl SourceRegistry {
    pub fn with_singletons(n_categorical: usize) -> Self {
        let mut r = Self::default();
        for f in 0..n_categorical as u32 {
            r.register(vec![f]);
        }
        r
    }

    pub fn from_sources(sources: Vec<Vec<u32>>) -> Self {
        let index = sources.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        Self { sources, index }
    }

    /// Id of the source with these features, registering it if new.
    pub fn register(&mut self, mut features: Vec<u32>) -> u32 {
        features.sort_unstable();
        features.dedup();
        if let Some(&id) = self.index.get(&features) {
            return id;
        }
        let id = self.sources.len() as u32;
        self.index.insert(features.clone(), id);
        self.sources.push(features);
        id
    }

    pub fn find(&self, features: &[u32]) -> Option<u32> {
        self.index.get(features).copied()
    }

    pub fn features(&self, source: u32) -> &[u32] {
        &self.sources[source as usize]
    }

    pub fn sources(&self) -> &[Vec<u32>] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

/// Combines every source already used in the current tree with every
/// categorical feature it does not contain, keeping combinations of at most
/// `max_combination` features. Returns the resulting source ids, ascending.
pub fn build_combinations(
    used_sources: &[u32],
    n_categorical: usize,
    max_combination: usize,
    registry: &mut SourceRegistry,
) -> Vec<u32> {
    let mut out = Vec::new();
    for &src in used_sources {
        let base = registry.features(src).to_vec();
        if base.len() >= max_combination {
            continue;
        }
        for f in 0..n_categorical as u32 {
            if base.contains(&f) {
                continue;
            }
            let mut combo = base.clone();
            combo.push(f);
            out.push(registry.register(combo));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Interned tuple ids of a combination over the given categorical columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CombinationIndex {
    tuples: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
}

impl CombinationIndex {
    /// Interns the tuples of `columns` row by row.
    pub fn build(columns: &[&[u32]]) -> (Self, Vec<u32>) {
        let n = columns.first().map_or(0, |c| c.len());
        let mut idx = Self::default();
        let mut ids = Vec::with_capacity(n);
        let mut key = Vec::with_capacity(columns.len());
        for row in 0..n {
            key.clear();
            key.extend(columns.iter().map(|c| c[row]));
            let next = idx.tuples.len() as u32;
            let id = *idx.index.entry(key.clone()).or_insert_with(|| {
                idx.tuples.push(key.clone());
                next
            });
            ids.push(id);
        }
        (idx, ids)
    }

    pub fn from_tuples(tuples: Vec<Vec<u32>>) -> Self {
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self { tuples, index }
    }

    pub fn lookup(&self, tuple: &[u32]) -> Option<u32> {
        self.index.get(tuple).copied()
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}
