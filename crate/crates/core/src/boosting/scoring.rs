//! Split scoring by `-cos(Delta, G)` under the inner product
//! `<u, v> = sum_i w_i u_i v_i` over the examples kept for scoring.
//!
//! Plain mode: `Delta(i)` is the weighted average of `G` in the leaf of `i`.
//! Ordered mode: `Delta(k)` averages the gradients of the level-`floor(log2 k)`
//! supporting model over earlier positions in the leaf of `k`.

use rayon::prelude::*;

use crate::boosting::supporting::OrderedModels;

/// Inputs for Plain-mode scoring, indexed by example.
pub struct PlainContext<'a> {
    pub gradients: &'a [f64],
    pub weights: &'a [f64],
    /// Leaves of the tree built so far.
    pub leaves: &'a [u32],
    /// Whether each example takes part in the cosine.
    pub kept: &'a [bool],
    /// Leaf count of the tree built so far.
    pub n_leaves: usize,
}

impl PlainContext<'_> {
    pub fn gradient_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.gradients.len() {
            if self.kept[i] {
                acc += self.weights[i] * self.gradients[i] * self.gradients[i];
            }
        }
        acc
    }

    /// Scores of splitting on `bins > b` for each border `b`; `None` when
    /// `Delta` is zero.
    pub fn column_scores(&self, bins: &[u16], n_borders: usize, gradient_norm: f64) -> Vec<Option<f64>> {
        let width = n_borders + 1;
        // Per (leaf, bin): weighted gradient sum, weight, and the kept parts.
        let mut hist = vec![[0.0f64; 4]; self.n_leaves * width];
        for i in 0..self.gradients.len() {
            let (w, g) = (self.weights[i], self.gradients[i]);
            let h = &mut hist[self.leaves[i] as usize * width + bins[i] as usize];
            h[0] += w * g;
            h[1] += w;
            if self.kept[i] {
                h[2] += w * g;
                h[3] += w;
            }
        }
        let mut below = vec![[0.0f64; 4]; self.n_leaves * width];
        let mut above = vec![[0.0f64; 4]; self.n_leaves * width];
        for leaf in 0..self.n_leaves {
            let row = leaf * width;
            let mut acc = [0.0; 4];
            for b in 0..width {
                add(&mut acc, &hist[row + b]);
                below[row + b] = acc;
            }
            let mut acc = [0.0; 4];
            for b in (0..width).rev() {
                above[row + b] = acc;
                add(&mut acc, &hist[row + b]);
            }
        }
        (0..n_borders)
            .map(|b| {
                let (mut num, mut den) = (0.0, 0.0);
                for leaf in 0..self.n_leaves {
                    for child in [&below[leaf * width + b], &above[leaf * width + b]] {
                        if child[1] > 0.0 {
                            let delta = child[0] / child[1];
                            num += delta * child[2];
                            den += delta * delta * child[3];
                        }
                    }
                }
                cosine_loss(num, den, gradient_norm)
            })
            .collect()
    }
}

fn add(acc: &mut [f64; 4], v: &[f64; 4]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

#[inline]
fn cosine_loss(num: f64, den: f64, gradient_norm: f64) -> Option<f64> {
    (den > 0.0 && gradient_norm > 0.0).then(|| -num / (den * gradient_norm).sqrt())
}

/// Inputs for Ordered-mode scoring, indexed by position in the permutation.
pub struct OrderedContext<'a> {
    /// `level_gradients[j][p]` for the positions level `j` stores.
    pub level_gradients: &'a [Vec<f64>],
    /// `G(k)`: level-`floor(log2 k)` gradient of position `k`, or the
    /// zero-model gradient for `k = 0`.
    pub target: &'a [f64],
    pub weights: &'a [f64],
    pub leaves: &'a [u32],
    pub n_leaves: usize,
    /// Positions below this are excluded from the cosine.
    pub kept_from: usize,
}

/// Reusable per-thread accumulators.
#[derive(Default)]
pub struct Scratch {
    sums: Vec<f64>,
    weights: Vec<f64>,
}

impl OrderedContext<'_> {
    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn gradient_norm(&self) -> f64 {
        let mut acc = 0.0;
        for k in self.kept_from..self.n() {
            acc += self.weights[k] * self.target[k] * self.target[k];
        }
        acc
    }

    /// Calls `visit(k, Delta(k))` for every position, with leaves given by
    /// `leaf_of` among `n_leaves`.
    fn scan(&self, n_leaves: usize, leaf_of: impl Fn(usize) -> usize, scratch: &mut Scratch, mut visit: impl FnMut(usize, f64)) {
        let n = self.n();
        if n == 0 {
            return;
        }
        scratch.sums.resize(n_leaves, 0.0);
        scratch.weights.resize(n_leaves, 0.0);
        visit(0, 0.0);
        let mut j = 0;
        while (1usize << j) < n {
            let start = 1usize << j;
            let end = OrderedModels::stored_len(n, j);
            let grads = &self.level_gradients[j];
            scratch.sums[..n_leaves].fill(0.0);
            scratch.weights[..n_leaves].fill(0.0);
            for p in 0..end {
                let leaf = leaf_of(p);
                if p >= start {
                    let w = scratch.weights[leaf];
                    visit(p, if w > 0.0 { scratch.sums[leaf] / w } else { 0.0 });
                }
                scratch.sums[leaf] += self.weights[p] * grads[p];
                scratch.weights[leaf] += self.weights[p];
            }
            j += 1;
        }
    }

    /// `Delta(k)` for every position under the given leaves.
    pub fn deltas(&self, leaves: &[u32], n_leaves: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.scan(n_leaves, |p| leaves[p] as usize, &mut Scratch::default(), |k, d| out[k] = d);
        out
    }

    pub fn border_score(&self, bins: &[u16], border: usize, gradient_norm: f64, scratch: &mut Scratch) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        let half = self.n_leaves;
        let leaf_of = |p: usize| self.leaves[p] as usize + if bins[p] as usize > border { half } else { 0 };
        self.scan(2 * half, leaf_of, scratch, |k, d| {
            if k >= self.kept_from {
                let w = self.weights[k];
                num += w * d * self.target[k];
                den += w * d * d;
            }
        });
        cosine_loss(num, den, gradient_norm)
    }

    /// Scores of every border of a column whose bins are given by position.
    pub fn column_scores(&self, bins: &[u16], n_borders: usize, gradient_norm: f64) -> Vec<Option<f64>> {
        (0..n_borders)
            .into_par_iter()
            .map_init(Scratch::default, |scratch, b| self.border_score(bins, b, gradient_norm, scratch))
            .collect()
    }
}
