//! Direct, unoptimized reimplementations used as test oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use ordboost::{Dataset, Loss, ObliviousTree, SplitSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixed dataset: `n_numeric` uniform features, one categorical feature with
/// `n_cats` values, binary target depending on both.
pub fn mixed_data(n: usize, n_numeric: usize, n_cats: u32, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let x: Vec<Vec<f64>> = (0..n_numeric).map(|_| (0..n).map(|_| r.gen::<f64>()).collect()).collect();
    let c: Vec<u32> = (0..n).map(|_| r.gen_range(0..n_cats)).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let logit = 2.0 * x[0][i] - 1.0 + if c[i] % 2 == 0 { 0.8 } else { -0.8 };
            f64::from(r.gen::<f64>() < 1.0 / (1.0 + (-logit).exp()))
        })
        .collect();
    let mut b = Dataset::builder();
    for (j, col) in x.into_iter().enumerate() {
        b = b.numeric(format!("x{j}"), col);
    }
    b.categorical_ids("c", c, n_cats as usize).target("y", y).build().unwrap()
}

/// Shares the library's gradient so exact comparisons see identical arithmetic.
pub fn gradient(loss: Loss, s: f64, y: f64) -> f64 {
    loss.gradient(s, y)
}

/// `(sum + a p) / (count + a)` over earlier examples of the same category in `order`.
pub fn ordered_ts(ids: &[u32], y: &[f64], a: f64, p: f64, order: &[u32]) -> Vec<f64> {
    let mut acc: HashMap<u32, (f64, f64)> = HashMap::new();
    let mut out = vec![0.0; ids.len()];
    for &e in order {
        let e = e as usize;
        let (s, c) = acc.get(&ids[e]).copied().unwrap_or((0.0, 0.0));
        out[e] = if c + a == 0.0 { p } else { (s + a * p) / (c + a) };
        let slot = acc.entry(ids[e]).or_insert((0.0, 0.0));
        slot.0 += y[e];
        slot.1 += 1.0;
    }
    out
}

/// Leaf of every row, reading TS sources from `ts(source)`.
pub fn leaves(tree: &ObliviousTree, data: &Dataset, ts: &dyn Fn(u32) -> Vec<f64>) -> Vec<u32> {
    let mut out = vec![0u32; data.n_rows()];
    for (level, split) in tree.splits().iter().enumerate() {
        let values = match split.source {
            SplitSource::Numeric { feature } => data.numeric(feature as usize).to_vec(),
            SplitSource::Ts { source } => ts(source),
        };
        for (leaf, v) in out.iter_mut().zip(values) {
            if v > split.threshold {
                *leaf |= 1 << level;
            }
        }
    }
    out
}

/// Supporting models maintained for every example at every prefix size
/// `2^j`: `models[r - 1][j][example]`.
pub struct FullMaintenance {
    pub models: Vec<Vec<Vec<f64>>>,
    n: usize,
}

impl FullMaintenance {
    pub fn new(n: usize, s: usize) -> Self {
        let levels = (0..).find(|&j| 1usize << j >= n).unwrap() + 1;
        Self {
            models: vec![vec![vec![0.0; n]; levels]; s],
            n,
        }
    }

    /// Subtracts `lr` times the in-leaf weighted gradient average over the
    /// first `2^j` examples of `order`, accumulated in position order.
    #[allow(clippy::too_many_arguments)]
    pub fn update(&mut self, r: usize, order: &[u32], leaves: &[u32], n_leaves: usize, w: &[f64], y: &[f64], loss: Loss, lr: f64) {
        for (j, m) in self.models[r - 1].iter_mut().enumerate() {
            let prefix = self.n.min(1 << j);
            let mut sums = vec![0.0; n_leaves];
            let mut ws = vec![0.0; n_leaves];
            for &e in &order[..prefix] {
                let e = e as usize;
                let l = leaves[e] as usize;
                sums[l] += w[e] * gradient(loss, m[e], y[e]);
                ws[l] += w[e];
            }
            for e in 0..self.n {
                let l = leaves[e] as usize;
                let avg = if ws[l] > 0.0 { sums[l] / ws[l] } else { 0.0 };
                m[e] -= lr * avg;
            }
        }
    }
}

/// Classical least-squares gradient boosting with oblivious trees: each level
/// takes the split maximizing `sum over leaves of S^2 / count` of the
/// gradients, leaves predict `-mean(gradient)`. Returns training predictions.
pub fn naive_gbdt(x: &[Vec<f64>], borders: &[Vec<f64>], y: &[f64], iterations: usize, lr: f64, depth: usize) -> Vec<f64> {
    let n = y.len();
    let mut f = vec![0.0; n];
    for _ in 0..iterations {
        let g: Vec<f64> = (0..n).map(|i| f[i] - y[i]).collect();
        let mut leaf = vec![0usize; n];
        for level in 0..depth {
            let width = 1 << (level + 1);
            let mut best: Option<(f64, usize, f64)> = None;
            for (feat, bs) in borders.iter().enumerate() {
                for &t in bs {
                    let mut s = vec![0.0; width];
                    let mut c = vec![0.0; width];
                    for i in 0..n {
                        let l = leaf[i] | (usize::from(x[feat][i] > t) << level);
                        s[l] += g[i];
                        c[l] += 1.0;
                    }
                    let gain: f64 = (0..width).filter(|&l| c[l] > 0.0).map(|l| s[l] * s[l] / c[l]).sum();
                    if gain > 0.0 && best.map_or(true, |(bg, _, _)| gain > bg) {
                        best = Some((gain, feat, t));
                    }
                }
            }
            let Some((_, feat, t)) = best else { break };
            for i in 0..n {
                leaf[i] |= usize::from(x[feat][i] > t) << level;
            }
        }
        let width = leaf.iter().max().map_or(1, |m| m + 1);
        let mut s = vec![0.0; width];
        let mut c = vec![0.0; width];
        for i in 0..n {
            s[leaf[i]] += g[i];
            c[leaf[i]] += 1.0;
        }
        for i in 0..n {
            f[i] += lr * -(s[leaf[i]] / c[leaf[i]]);
        }
    }
    f
}

/// `-cos(Delta, G)` over the kept examples under the `w`-weighted inner product.
pub fn neg_cosine(delta: &[f64], g: &[f64], w: &[f64], kept: &[bool]) -> Option<f64> {
    let (mut num, mut den, mut norm) = (0.0, 0.0, 0.0);
    for i in 0..g.len() {
        if kept[i] {
            num += w[i] * delta[i] * g[i];
            den += w[i] * delta[i] * delta[i];
            norm += w[i] * g[i] * g[i];
        }
    }
    (den > 0.0 && norm > 0.0).then(|| -num / (den * norm).sqrt())
}

/// Midpoints between adjacent distinct values.
pub fn midpoints(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect()
}
