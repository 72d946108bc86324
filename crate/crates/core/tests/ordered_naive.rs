mod support;

use ordboost::{train_ordered_naive, Dataset, Loss};
use rand::Rng;
use support::*;

fn data(n: usize, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let x0: Vec<f64> = (0..n).map(|_| r.gen()).collect();
    let x1: Vec<f64> = (0..n).map(|_| r.gen()).collect();
    let y: Vec<f64> = (0..n).map(|i| 3.0 * x0[i] - x1[i] + r.gen_range(-0.5..0.5)).collect();
    Dataset::builder().numeric("x0", x0).numeric("x1", x1).target("y", y).build().unwrap()
}

/// Stump as (feature, threshold, left, right); `None` split predicts `left`.
type Fit = (Option<(usize, f64)>, f64, f64);

fn fit(rows: &[[f64; 2]], r: &[f64], members: &[usize]) -> Fit {
    let mean = |ix: &[usize]| if ix.is_empty() { 0.0 } else { ix.iter().map(|&i| r[i]).sum::<f64>() / ix.len() as f64 };
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..2 {
        let col: Vec<f64> = rows.iter().map(|x| x[f]).collect();
        for t in midpoints(&col) {
            let (right, left): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| rows[i][f] > t);
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let sl: f64 = left.iter().map(|&i| r[i]).sum();
            let sr: f64 = right.iter().map(|&i| r[i]).sum();
            let gain = sl * sl / left.len() as f64 + sr * sr / right.len() as f64;
            if best.map_or(true, |(g, _, _)| gain > g) {
                best = Some((gain, f, t));
            }
        }
    }
    match best {
        None => (None, mean(members), 0.0),
        Some((_, f, t)) => {
            let (right, left): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| rows[i][f] > t);
            (Some((f, t)), mean(&left), mean(&right))
        }
    }
}

fn eval(stumps: &[Fit], lr: f64, x: &[f64; 2]) -> f64 {
    stumps
        .iter()
        .map(|&(split, l, r)| {
            lr * match split {
                Some((f, t)) if x[f] > t => r,
                _ => l,
            }
        })
        .sum()
}

/// The ordered boosting loop written directly: model `i` is trained on the
/// first `i` examples and example at position `k` takes its residual from model `k`.
fn reference(d: &Dataset, order: &[u32], iterations: usize, lr: f64) -> Vec<Vec<Fit>> {
    let n = d.n_rows();
    let rows: Vec<[f64; 2]> = (0..n).map(|i| [d.numeric(0)[i], d.numeric(1)[i]]).collect();
    let mut models: Vec<Vec<Fit>> = vec![Vec::new(); n + 1];
    for _ in 0..iterations {
        let mut r = vec![0.0; n];
        for (k, &e) in order.iter().enumerate() {
            let e = e as usize;
            r[e] = d.targets()[e] - eval(&models[k], lr, &rows[e]);
        }
        for i in 1..=n {
            let members: Vec<usize> = order[..i].iter().map(|&e| e as usize).collect();
            let s = fit(&rows, &r, &members);
            models[i].push(s);
        }
    }
    models
}

#[test]
fn matches_direct_loop() {
    for (iterations, seed) in [(1, 0), (1, 1), (3, 2), (4, 3)] {
        let d = data(40, seed);
        let lr = 0.5;
        let m = train_ordered_naive(&d, iterations, lr, Loss::Mse, seed).unwrap();
        let expect = reference(&d, m.permutation.order(), iterations, lr);
        for i in 0..=d.n_rows() {
            for row in 0..d.n_rows() {
                let x = [d.numeric(0)[row], d.numeric(1)[row]];
                let got = m.predict_with(i, &x);
                let want = eval(&expect[i], lr, &x);
                assert!((got - want).abs() <= 1e-12, "model {i} row {row}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn residuals_ignore_later_examples() {
    let d = data(30, 7);
    let m = train_ordered_naive(&d, 3, 0.3, Loss::Mse, 5).unwrap();
    for k in [0, 5, 17, 29] {
        let e = m.permutation.example_at(k);
        let mut y = d.targets().to_vec();
        y[e] += 10.0;
        let changed = Dataset::builder()
            .numeric("x0", d.numeric(0).to_vec())
            .numeric("x1", d.numeric(1).to_vec())
            .target("y", y)
            .build()
            .unwrap();
        let m2 = train_ordered_naive(&changed, 3, 0.3, Loss::Mse, 5).unwrap();
        for (a, b) in m.residuals.iter().zip(&m2.residuals) {
            for pos in 0..k {
                let i = m.permutation.example_at(pos);
                assert_eq!(a[i], b[i], "position {pos} saw example at {k}");
            }
        }
    }
}

#[test]
fn first_example_uses_zero_model() {
    let d = data(10, 1);
    let m = train_ordered_naive(&d, 2, 0.4, Loss::Mse, 2).unwrap();
    let first = m.permutation.example_at(0);
    for r in &m.residuals {
        assert_eq!(r[first], d.targets()[first]);
    }
}
