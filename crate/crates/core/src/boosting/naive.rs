//! Unoptimized ordered boosting with one model per permutation prefix.
//!
//! `M_i` is trained only on the first `i` examples of the permutation, and
//! the residual of the example at position `k` always comes from `M_k`, so
//! no example's target reaches the model that computes its own residual.
//! Each model step is a least-squares decision stump on numerical features.
//! Quadratic in `n`; intended as a reference for small data.

use crate::boosting::params::Loss;
use crate::dataset::{quantize, BorderSet, Dataset, Permutation};
use crate::error::{Error, Result};

pub const NAIVE_MAX_ROWS: usize = 200;
const NAIVE_BORDER_COUNT: usize = 255;

/// `x[feature] > threshold ? values[1] : values[0]`, or a constant `values[0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stump {
    pub split: Option<(usize, f64)>,
    pub values: [f64; 2],
}

impl Stump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.split {
            Some((f, t)) if x[f] > t => self.values[1],
            _ => self.values[0],
        }
    }
}

#[derive(Clone, Debug)]
pub struct NaiveOrderedModels {
    pub permutation: Permutation,
    pub learning_rate: f64,
    /// `models[i]` holds the stumps of `M_i`, `i = 0..=n`.
    pub models: Vec<Vec<Stump>>,
    /// Residuals by example for each iteration.
    pub residuals: Vec<Vec<f64>>,
}

impl NaiveOrderedModels {
    pub fn predict_with(&self, model: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for stump in &self.models[model] {
            s += self.learning_rate * stump.eval(x);
        }
        s
    }

    /// Prediction of `M_n`, the model trained on all examples.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.predict_with(self.models.len() - 1, x)
    }
}

pub fn train_ordered_naive(
    data: &Dataset,
    iterations: usize,
    learning_rate: f64,
    loss: Loss,
    seed: u64,
) -> Result<NaiveOrderedModels> {
    let n = data.n_rows();
    if n == 0 || n > NAIVE_MAX_ROWS {
        return Err(Error::invalid(format!("naive ordered boosting needs 1..={NAIVE_MAX_ROWS} rows, got {n}")));
    }
    if data.n_categorical() > 0 {
        return Err(Error::invalid("naive ordered boosting supports numerical features only"));
    }
    let perm = Permutation::random(n, seed, 0);
    let borders = (0..data.n_numeric())
        .map(|f| quantize(data.numeric(f), NAIVE_BORDER_COUNT))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = (0..n).map(|i| data.numeric_row(i)).collect();
    let y = data.targets();

    let mut out = NaiveOrderedModels {
        permutation: perm,
        learning_rate,
        models: vec![Vec::new(); n + 1],
        residuals: Vec::with_capacity(iterations),
    };
    for _ in 0..iterations {
        let residuals: Vec<f64> = (0..n)
            .map(|i| {
                let prev = out.predict_with(out.permutation.position(i), &rows[i]);
                -loss.gradient(prev, y[i])
            })
            .collect();
        for i in 1..=n {
            let prefix: Vec<usize> = (0..i).map(|k| out.permutation.example_at(k)).collect();
            let stump = fit_stump(&rows, &residuals, &prefix, &borders);
            out.models[i].push(stump);
        }
        out.residuals.push(residuals);
    }
    Ok(out)
}

/// Least-squares stump on `rows[examples]`. The split maximizing
/// `sum over children of S^2 / count` wins, lowest (feature, border) on ties.
fn fit_stump(rows: &[Vec<f64>], targets: &[f64], examples: &[usize], borders: &[BorderSet]) -> Stump {
    let mean = |sel: &mut dyn Iterator<Item = usize>| {
        let (mut s, mut c) = (0.0, 0usize);
        for i in sel {
            s += targets[i];
            c += 1;
        }
        if c == 0 {
            0.0
        } else {
            s / c as f64
        }
    };
    let mut best: Option<(f64, usize, f64)> = None;
    for (f, bs) in borders.iter().enumerate() {
        for &t in bs.borders() {
            let (mut sl, mut cl, mut sr, mut cr) = (0.0, 0.0, 0.0, 0.0);
            for &i in examples {
                if rows[i][f] > t {
                    sr += targets[i];
                    cr += 1.0;
                } else {
                    sl += targets[i];
                    cl += 1.0;
                }
            }
            if cl == 0.0 || cr == 0.0 {
                continue;
            }
            let gain = sl * sl / cl + sr * sr / cr;
            if best.map_or(true, |(g, _, _)| gain > g) {
                best = Some((gain, f, t));
            }
        }
    }
    match best {
        Some((_, f, t)) => Stump {
            split: Some((f, t)),
            values: [
                mean(&mut examples.iter().copied().filter(|&i| rows[i][f] <= t)),
                mean(&mut examples.iter().copied().filter(|&i| rows[i][f] > t)),
            ],
        },
        None => Stump {
            split: None,
            values: [mean(&mut examples.iter().copied()), 0.0],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_example() {
        let d = Dataset::builder()
            .numeric("x", vec![1.0])
            .target("y", vec![3.0])
            .build()
            .unwrap();
        let m = train_ordered_naive(&d, 1, 1.0, Loss::Mse, 0).unwrap();
        assert_eq!(m.residuals[0], vec![3.0]);
        assert_eq!(m.predict(&[1.0]), 3.0);
        assert_eq!(m.predict_with(0, &[1.0]), 0.0);
    }

    #[test]
    fn rejects_large_or_categorical_data() {
        let big = Dataset::builder()
            .numeric("x", vec![0.0; 201])
            .target("y", vec![0.0; 201])
            .build()
            .unwrap();
        assert!(train_ordered_naive(&big, 1, 1.0, Loss::Mse, 0).is_err());
        let cat = Dataset::builder()
            .categorical("c", &["a"])
            .target("y", vec![0.0])
            .build()
            .unwrap();
        assert!(train_ordered_naive(&cat, 1, 1.0, Loss::Mse, 0).is_err());
    }
}
