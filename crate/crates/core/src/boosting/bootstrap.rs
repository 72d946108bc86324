use rand::Rng;

use crate::error::{Error, Result};
use crate::random::{self, Domain};

/// Bayesian bootstrap weights `w_i = a_i^t`, where `a` is `n` times the gaps
/// between `n - 1` sorted uniforms on `[0, 1]` (so `a` has mean 1).
pub fn bootstrap_weights(n: usize, temperature: f64, seed: u64) -> Result<Vec<f64>> {
    tree_weights(n, temperature, seed, 0)
}

/// Weights for tree `tree` of a run with the given seed.
pub fn tree_weights(n: usize, temperature: f64, seed: u64, tree: u64) -> Result<Vec<f64>> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::invalid(format!("bootstrap temperature must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(vec![1.0; n]);
    }
    let mut rng = random::stream(seed, Domain::Bootstrap, tree);
    let mut cuts: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_unstable_by(f64::total_cmp);
    let scale = n as f64;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(n);
    for c in cuts.into_iter().chain((n > 0).then_some(1.0)) {
        let a = (c - prev) * scale;
        prev = c;
        out.push(if temperature == 1.0 { a } else { a.powf(temperature) });
    }
    Ok(out)
}
