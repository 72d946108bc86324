//! Supporting models used to compute unshifted gradients.
//!
//! In Ordered mode `M_{r,j}` is the model trained on the first `2^j` examples
//! of permutation `r`. Its prediction is only ever read for positions below
//! `2^{j+1}` (positions in `[2^j, 2^{j+1})` take their gradients from it), so
//! only those entries are stored, indexed by position.

use crate::boosting::gradient::checked_gradient;
use crate::boosting::params::{Loss, Mode};
use crate::error::Result;

/// `ceil(log2(n))` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Level `j` of supporting models whose gradients position `k` uses:
/// `floor(log2 k)`, or `None` for the first position, which uses the zero model.
#[inline]
pub fn gradient_level(position: usize) -> Option<usize> {
    (position > 0).then(|| (usize::BITS - 1 - position.leading_zeros()) as usize)
}

/// Supporting models `M'_{r,j}` for `r = 1..=s`, `j = 0..=ceil(log2 n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedModels {
    n: usize,
    /// `values[r - 1][j][position]`.
    values: Vec<Vec<Vec<f64>>>,
}

impl OrderedModels {
    pub fn new(n: usize, s: usize) -> Self {
        let levels = if n == 0 { 0 } else { ceil_log2(n) + 1 };
        let values = (0..s)
            .map(|_| (0..levels).map(|j| vec![0.0; Self::stored_len(n, j)]).collect())
            .collect();
        Self { n, values }
    }

    /// Number of stored positions at level `j`: `min(2^{j+1}, n)`.
    pub fn stored_len(n: usize, j: usize) -> usize {
        n.min(1usize << (j + 1).min(usize::BITS as usize - 1))
    }

    /// Number of positions model `j` is trained on: `min(2^j, n)`.
    pub fn train_len(n: usize, j: usize) -> usize {
        n.min(1usize << j.min(usize::BITS as usize - 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn permutations(&self) -> usize {
        self.values.len()
    }

    pub fn levels(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Stored predictions of `M'_{r,j}` by position, `r` in `1..=s`.
    pub fn level(&self, r: usize, j: usize) -> &[f64] {
        &self.values[r - 1][j]
    }

    pub fn stored_count(&self) -> usize {
        self.values.iter().flatten().map(Vec::len).sum()
    }

    /// Gradients of level `j` for the positions it stores.
    pub fn level_gradients(&self, r: usize, j: usize, loss: Loss, targets_by_pos: &[f64]) -> Result<Vec<f64>> {
        self.values[r - 1][j]
            .iter()
            .zip(targets_by_pos)
            .map(|(&m, &y)| checked_gradient(loss, m, y))
            .collect()
    }

    /// One boosting step for permutation `r`: every level subtracts
    /// `lr` times the weighted in-leaf gradient average over its training prefix.
    pub fn update(
        &mut self,
        r: usize,
        leaves_by_pos: &[u32],
        weights_by_pos: &[f64],
        targets_by_pos: &[f64],
        n_leaves: usize,
        loss: Loss,
        learning_rate: f64,
    ) -> Result<()> {
        let n = self.n;
        let mut sums = vec![0.0; n_leaves];
        let mut wsum = vec![0.0; n_leaves];
        for (j, level) in self.values[r - 1].iter_mut().enumerate() {
            sums.fill(0.0);
            wsum.fill(0.0);
            for p in 0..Self::train_len(n, j) {
                let g = checked_gradient(loss, level[p], targets_by_pos[p])?;
                let leaf = leaves_by_pos[p] as usize;
                sums[leaf] += weights_by_pos[p] * g;
                wsum[leaf] += weights_by_pos[p];
            }
            for (p, m) in level.iter_mut().enumerate() {
                let leaf = leaves_by_pos[p] as usize;
                let avg = if wsum[leaf] > 0.0 { sums[leaf] / wsum[leaf] } else { 0.0 };
                *m -= learning_rate * avg;
            }
        }
        Ok(())
    }
}

/// Weighted in-leaf gradient averages, accumulated in index order. Leaves
/// without weight get zero.
pub fn leaf_averages(gradients: &[f64], leaves: &[u32], weights: &[f64], n_leaves: usize) -> Vec<f64> {
    let mut sums = vec![0.0; n_leaves];
    let mut wsum = vec![0.0; n_leaves];
    for ((&g, &l), &w) in gradients.iter().zip(leaves).zip(weights) {
        sums[l as usize] += w * g;
        wsum[l as usize] += w;
    }
    sums.iter()
        .zip(&wsum)
        .map(|(&s, &w)| if w > 0.0 { s / w } else { 0.0 })
        .collect()
}

/// Predictions maintained by a trainer with `n` examples and `s` permutations,
/// including the `n` values of the leaf-value model `M_0`.
pub fn maintained_predictions(mode: Mode, n: usize, s: usize) -> usize {
    match mode {
        Mode::Plain => n * (s + 1),
        Mode::Ordered => n + OrderedModels::new(n, s).stored_count(),
    }
}
