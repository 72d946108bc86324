//! Target statistics for categorical features.
//!
//! A target statistic replaces category `c` of example `k` by
//! `(sum of targets over D_k with category c + a * p) / (count over D_k + a)`,
//! where `D_k` is a subset of the training data that depends on the mode:
//!
//! * greedy: all training rows, including `k` itself;
//! * holdout: a fixed random half of the data, the other half is trained on;
//! * leave-one-out: all rows except `k`;
//! * ordered: the rows preceding `k` in a random permutation.
//!
//! At apply time every mode uses a table built from its full statistics scope.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::{Dataset, Permutation};
use crate::error::{Error, Result};
use crate::random::{self, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TsMode {
    Greedy,
    Holdout,
    LeaveOneOut,
    Ordered,
}

impl std::fmt::Display for TsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TsMode::Greedy => "greedy",
            TsMode::Holdout => "holdout",
            TsMode::LeaveOneOut => "leave_one_out",
            TsMode::Ordered => "ordered",
        })
    }
}

/// Smoothing prior `(a, p)` and encoding mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TsConfig {
    pub prior_weight: f64,
    pub prior: f64,
    pub mode: TsMode,
}

impl TsConfig {
    /// `prior_weight` may be zero; an empty history then encodes to `prior`.
    pub fn new(mode: TsMode, prior_weight: f64, prior: f64) -> Result<Self> {
        if !(prior_weight >= 0.0 && prior_weight.is_finite()) {
            return Err(Error::invalid(format!("prior weight must be >= 0, got {prior_weight}")));
        }
        if !prior.is_finite() {
            return Err(Error::invalid("prior must be finite"));
        }
        Ok(Self {
            prior_weight,
            prior,
            mode,
        })
    }

    /// Prior set to the mean of `targets`.
    pub fn with_mean_prior(mode: TsMode, prior_weight: f64, targets: &[f64]) -> Result<Self> {
        let mean = if targets.is_empty() {
            0.0
        } else {
            targets.iter().sum::<f64>() / targets.len() as f64
        };
        Self::new(mode, prior_weight, mean)
    }

    fn value(&self, sum: f64, count: u32) -> f64 {
        smoothed(sum, count, self.prior_weight, self.prior)
    }

    fn expect(&self, mode: TsMode) -> Result<()> {
        if self.mode != mode {
            return Err(Error::invalid(format!("encoder for {mode} called with mode {}", self.mode)));
        }
        Ok(())
    }
}

#[inline]
fn smoothed(sum: f64, count: u32, a: f64, p: f64) -> f64 {
    let denom = count as f64 + a;
    if denom > 0.0 {
        (sum + a * p) / denom
    } else {
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TsScope {
    Full,
    Holdout,
    Prefix,
}

/// Per-category `(target sum, count)` with the smoothing prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TsTable {
    sums: Vec<f64>,
    counts: Vec<u32>,
    prior_weight: f64,
    prior: f64,
    scope: TsScope,
}

impl TsTable {
    pub fn empty(cardinality: usize, prior_weight: f64, prior: f64, scope: TsScope) -> Self {
        Self {
            sums: vec![0.0; cardinality],
            counts: vec![0; cardinality],
            prior_weight,
            prior,
            scope,
        }
    }

    /// Statistics over the given rows.
    pub fn from_rows(
        ids: &[u32],
        targets: &[f64],
        rows: impl IntoIterator<Item = usize>,
        cardinality: usize,
        cfg: &TsConfig,
        scope: TsScope,
    ) -> Self {
        let mut t = Self::empty(cardinality, cfg.prior_weight, cfg.prior, scope);
        for r in rows {
            t.add(ids[r], targets[r]);
        }
        t
    }

    pub fn add(&mut self, id: u32, target: f64) {
        let id = id as usize;
        if id >= self.sums.len() {
            self.sums.resize(id + 1, 0.0);
            self.counts.resize(id + 1, 0);
        }
        self.sums[id] += target;
        self.counts[id] += 1;
    }

    /// Encoded value; ids without statistics resolve to the prior.
    pub fn value(&self, id: u32) -> f64 {
        let id = id as usize;
        match (self.sums.get(id), self.counts.get(id)) {
            (Some(&s), Some(&c)) => smoothed(s, c, self.prior_weight, self.prior),
            _ => self.prior,
        }
    }

    pub fn stats(&self, id: u32) -> (f64, u32) {
        let id = id as usize;
        (
            self.sums.get(id).copied().unwrap_or(0.0),
            self.counts.get(id).copied().unwrap_or(0),
        )
    }

    pub fn cardinality(&self) -> usize {
        self.sums.len()
    }

    pub fn scope(&self) -> TsScope {
        self.scope
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn prior_weight(&self) -> f64 {
        self.prior_weight
    }
}

/// Training-time encoding of a column plus the apply-time table.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoded {
    pub values: Vec<f64>,
    pub table: TsTable,
}

fn cardinality_of(ids: &[u32]) -> usize {
    ids.iter().copied().max().map_or(0, |m| m as usize + 1)
}

fn check_lengths(ids: &[u32], targets: &[f64]) -> Result<()> {
    if ids.len() != targets.len() {
        return Err(Error::invalid(format!(
            "{} category ids but {} targets",
            ids.len(),
            targets.len()
        )));
    }
    Ok(())
}

/// Greedy statistics: every row is encoded with the full-data table, including itself.
pub fn greedy_encode(ids: &[u32], targets: &[f64], cfg: &TsConfig) -> Result<Encoded> {
    check_lengths(ids, targets)?;
    let table = TsTable::from_rows(ids, targets, 0..ids.len(), cardinality_of(ids), cfg, TsScope::Full);
    let values = ids.iter().map(|&c| table.value(c)).collect();
    Ok(Encoded { values, table })
}

/// Leave-one-out statistics: row `k` is encoded without its own target.
pub fn leave_one_out_encode(ids: &[u32], targets: &[f64], cfg: &TsConfig) -> Result<Encoded> {
    check_lengths(ids, targets)?;
    let table = TsTable::from_rows(ids, targets, 0..ids.len(), cardinality_of(ids), cfg, TsScope::Full);
    let values = ids
        .iter()
        .zip(targets)
        .map(|(&c, &y)| {
            let (s, n) = table.stats(c);
            cfg.value(s - y, n - 1)
        })
        .collect();
    Ok(Encoded { values, table })
}

/// Ordered statistics: row `k` is encoded from the rows before it in `perm`.
pub fn ordered_encode(ids: &[u32], targets: &[f64], cfg: &TsConfig, perm: &Permutation) -> Result<Encoded> {
    check_lengths(ids, targets)?;
    if perm.len() != ids.len() {
        return Err(Error::invalid(format!(
            "permutation of {} examples for {} rows",
            perm.len(),
            ids.len()
        )));
    }
    let mut running = TsTable::empty(cardinality_of(ids), cfg.prior_weight, cfg.prior, TsScope::Prefix);
    let mut values = vec![0.0; ids.len()];
    for &ex in perm.order() {
        let ex = ex as usize;
        values[ex] = running.value(ids[ex]);
        running.add(ids[ex], targets[ex]);
    }
    running.scope = TsScope::Full;
    Ok(Encoded { values, table: running })
}

/// Holdout statistics over an explicit partition.
#[derive(Clone, Debug, PartialEq)]
pub struct HoldoutEncoded {
    /// Rows whose targets feed the statistics.
    pub stat_rows: Vec<usize>,
    /// Rows used for training, in increasing order.
    pub train_rows: Vec<usize>,
    /// Encoded values for `train_rows`, aligned with it.
    pub values: Vec<f64>,
    pub table: TsTable,
}

/// Random 50/50 partition into statistic rows and training rows.
pub fn holdout_partition(n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::invalid(format!("holdout statistics need at least 2 rows, got {n}")));
    }
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut random::stream(seed, Domain::Holdout, 0));
    let half = n / 2;
    let (a, b) = rows.split_at_mut(half);
    a.sort_unstable();
    b.sort_unstable();
    Ok((a.to_vec(), b.to_vec()))
}

pub fn holdout_encode_with(
    ids: &[u32],
    targets: &[f64],
    cfg: &TsConfig,
    stat_rows: Vec<usize>,
    train_rows: Vec<usize>,
) -> Result<HoldoutEncoded> {
    check_lengths(ids, targets)?;
    if stat_rows.is_empty() || train_rows.is_empty() {
        return Err(Error::invalid("holdout partition has an empty part"));
    }
    let table = TsTable::from_rows(
        ids,
        targets,
        stat_rows.iter().copied(),
        cardinality_of(ids),
        cfg,
        TsScope::Holdout,
    );
    let values = train_rows.iter().map(|&r| table.value(ids[r])).collect();
    Ok(HoldoutEncoded {
        stat_rows,
        train_rows,
        values,
        table,
    })
}

pub fn holdout_encode(ids: &[u32], targets: &[f64], cfg: &TsConfig, partition_seed: u64) -> Result<HoldoutEncoded> {
    let (stat_rows, train_rows) = holdout_partition(ids.len(), partition_seed)?;
    holdout_encode_with(ids, targets, cfg, stat_rows, train_rows)
}

pub fn greedy_ts(train: &Dataset, feature: usize, cfg: &TsConfig) -> Result<Encoded> {
    cfg.expect(TsMode::Greedy)?;
    greedy_encode(train.categorical(feature), train.targets(), cfg)
}

pub fn holdout_ts(train: &Dataset, feature: usize, cfg: &TsConfig, partition_seed: u64) -> Result<HoldoutEncoded> {
    cfg.expect(TsMode::Holdout)?;
    holdout_encode(train.categorical(feature), train.targets(), cfg, partition_seed)
}

pub fn loo_ts(train: &Dataset, feature: usize, cfg: &TsConfig) -> Result<Encoded> {
    cfg.expect(TsMode::LeaveOneOut)?;
    leave_one_out_encode(train.categorical(feature), train.targets(), cfg)
}

pub fn ordered_ts(train: &Dataset, feature: usize, cfg: &TsConfig, perm: &Permutation) -> Result<Encoded> {
    cfg.expect(TsMode::Ordered)?;
    ordered_encode(train.categorical(feature), train.targets(), cfg, perm)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassComparison {
    pub class: u8,
    pub train_mean: f64,
    pub test_mean: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct P1Outcome {
    pub rejected: bool,
    pub classes: Vec<ClassComparison>,
}

impl P1Outcome {
    pub fn holds(&self) -> bool {
        !self.rejected
    }
}

/// Two-sided Welch test of mean equality. Zero pooled standard error gives
/// p = 1 for equal means and p = 0 otherwise.
pub fn welch_p_value(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("welch test needs non-empty samples"));
    }
    let mean_var = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = if x.len() > 1 {
            x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (m, v, n)
    };
    let (ma, va, na) = mean_var(a);
    let (mb, vb, nb) = mean_var(b);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    // Treat differences at rounding level as equal means.
    let scale = ma.abs().max(mb.abs()).max(1.0);
    if se2 <= (1e-15 * scale).powi(2) {
        return Ok(if (ma - mb).abs() <= 1e-12 * scale { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let mut df = se2 * se2;
    let denom = if na > 1.0 { sa * sa / (na - 1.0) } else { 0.0 } + if nb > 1.0 { sb * sb / (nb - 1.0) } else { 0.0 };
    df = if denom > 0.0 { df / denom } else { f64::INFINITY };
    let df = df.max(1.0);
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

/// Tests `E(x | y = v)` equality between training and test encodings for each
/// binary class `v`. The property is rejected when any class rejects.
pub fn p1_test(
    train_values: &[f64],
    train_targets: &[f64],
    test_values: &[f64],
    test_targets: &[f64],
    significance: f64,
) -> Result<P1Outcome> {
    check_pair(train_values, train_targets)?;
    check_pair(test_values, test_targets)?;
    let mut classes = Vec::with_capacity(2);
    for class in [0u8, 1u8] {
        let v = class as f64;
        let pick = |xs: &[f64], ys: &[f64]| -> Vec<f64> {
            xs.iter().zip(ys).filter(|(_, &y)| y == v).map(|(&x, _)| x).collect()
        };
        let a = pick(train_values, train_targets);
        let b = pick(test_values, test_targets);
        if a.is_empty() || b.is_empty() {
            return Err(Error::invalid(format!("target class {class} absent from a sample")));
        }
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        classes.push(ClassComparison {
            class,
            train_mean: mean(&a),
            test_mean: mean(&b),
            p_value: welch_p_value(&a, &b)?,
        });
    }
    let rejected = classes.iter().any(|c| c.p_value < significance);
    Ok(P1Outcome { rejected, classes })
}

fn check_pair(values: &[f64], targets: &[f64]) -> Result<()> {
    if values.len() != targets.len() {
        return Err(Error::invalid("encodings and targets differ in length"));
    }
    if targets.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::invalid("p1 test requires binary targets"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(mode: TsMode, a: f64, p: f64) -> TsConfig {
        TsConfig::new(mode, a, p).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn greedy_examples() {
        let e = greedy_encode(&[0, 0, 0], &[1.0, 0.0, 1.0], &cfg(TsMode::Greedy, 1.0, 0.5)).unwrap();
        assert!(e.values.iter().all(|&v| close(v, 2.5 / 4.0)));
        assert_eq!(e.table.value(7), 0.5);

        // All-unique categories with y = 1: (1 + a p) / (1 + a).
        let e = greedy_encode(&[0, 1, 2], &[1.0, 1.0, 1.0], &cfg(TsMode::Greedy, 1.0, 0.5)).unwrap();
        assert!(e.values.iter().all(|&v| close(v, 0.75)));
    }

    #[test]
    fn holdout_examples() {
        // D0 = {(A,1),(A,0)}, a = 0: training rows with A get 0.5.
        let ids = [0, 0, 0, 1];
        let y = [1.0, 0.0, 1.0, 1.0];
        let e = holdout_encode_with(&ids, &y, &cfg(TsMode::Holdout, 0.0, 0.3), vec![0, 1], vec![2, 3]).unwrap();
        assert!(close(e.values[0], 0.5));
        // Category only in the training part: prior.
        assert_eq!(e.values[1], 0.3);

        let e = holdout_encode_with(&ids, &y, &cfg(TsMode::Holdout, 1.0, 0.5), vec![0, 1], vec![2, 3]).unwrap();
        assert_eq!(e.values[1], 0.5);

        assert!(holdout_encode(&[0], &[1.0], &cfg(TsMode::Holdout, 1.0, 0.5), 1).is_err());
        assert!(holdout_encode_with(&ids, &y, &cfg(TsMode::Holdout, 1.0, 0.5), vec![], vec![0, 1, 2, 3]).is_err());
    }

    #[test]
    fn holdout_partition_is_half_and_disjoint() {
        let (a, b) = holdout_partition(11, 3).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(b.len(), 6);
        let mut all = [a, b].concat();
        all.sort_unstable();
        assert_eq!(all, (0..11).collect::<Vec<_>>());
    }

    #[test]
    fn loo_examples() {
        let c = cfg(TsMode::LeaveOneOut, 0.0, 0.5);
        let e = leave_one_out_encode(&[0; 4], &[1.0, 1.0, 0.0, 0.0], &c).unwrap();
        assert!(close(e.values[0], 1.0 / 3.0));
        assert!(close(e.values[1], 1.0 / 3.0));
        assert!(close(e.values[2], 2.0 / 3.0));
        assert!(close(e.values[3], 2.0 / 3.0));
        assert!(close(e.table.value(0), 0.5));

        let e = leave_one_out_encode(&[0, 1], &[1.0, 0.0], &cfg(TsMode::LeaveOneOut, 1.0, 0.5)).unwrap();
        assert_eq!(e.values, vec![0.5, 0.5]);
    }

    #[test]
    fn ordered_examples() {
        let c = cfg(TsMode::Ordered, 1.0, 0.5);
        let e = ordered_encode(&[0, 0, 0], &[1.0, 0.0, 1.0], &c, &Permutation::identity(3)).unwrap();
        assert!(close(e.values[0], 0.5));
        assert!(close(e.values[1], 0.75));
        assert!(close(e.values[2], 0.5));
        // Apply-time table covers all rows.
        assert!(close(e.table.value(0), 2.5 / 4.0));

        let p = Permutation::from_order(vec![2, 0, 1]).unwrap();
        let e = ordered_encode(&[0, 0, 0], &[1.0, 0.0, 1.0], &c, &p).unwrap();
        assert_eq!(e.values[2], 0.5);
    }

    #[test]
    fn wrappers_check_mode() {
        let d = Dataset::builder()
            .categorical("c", &["a", "b", "a"])
            .target("y", vec![1.0, 0.0, 1.0])
            .build()
            .unwrap();
        assert!(greedy_ts(&d, 0, &cfg(TsMode::Ordered, 1.0, 0.5)).is_err());
        let g = greedy_ts(&d, 0, &cfg(TsMode::Greedy, 1.0, 0.5)).unwrap();
        assert!(close(g.values[1], 0.25));
        let l = loo_ts(&d, 0, &cfg(TsMode::LeaveOneOut, 1.0, 0.5)).unwrap();
        assert!(close(l.values[0], 0.75));
        let o = ordered_ts(&d, 0, &cfg(TsMode::Ordered, 1.0, 0.5), &Permutation::identity(3)).unwrap();
        assert!(close(o.values[2], 0.75));
        assert!(holdout_ts(&d, 0, &cfg(TsMode::Holdout, 1.0, 0.5), 4).is_ok());
    }

    #[test]
    fn singleton_divergence_is_the_leakage_signature() {
        let (a, p) = (1.0, 0.4);
        let ids: Vec<u32> = (0..6).collect();
        let y = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        let g = greedy_encode(&ids, &y, &cfg(TsMode::Greedy, a, p)).unwrap();
        let l = leave_one_out_encode(&ids, &y, &cfg(TsMode::LeaveOneOut, a, p)).unwrap();
        for k in 0..6 {
            assert!(close(g.values[k], (y[k] + a * p) / (1.0 + a)));
            assert_eq!(l.values[k], p);
        }
    }

    #[test]
    fn p1_identical_samples_not_rejected() {
        let v = [0.1, 0.4, 0.3, 0.9, 0.2, 0.5];
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        assert!(p1_test(&v, &y, &v, &y, 0.01).unwrap().holds());
        assert!(p1_test(&v, &y, &v, &[0.0; 6], 0.01).is_err());
        let c = [0.5; 6];
        assert!(p1_test(&c, &y, &c, &y, 0.01).unwrap().holds());
    }

    #[test]
    fn welch_detects_shift() {
        let a: Vec<f64> = (0..200).map(|i| (i % 10) as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 3.0).collect();
        assert!(welch_p_value(&a, &b).unwrap() < 1e-10);
        assert!(welch_p_value(&a, &a).unwrap() > 0.99);
    }

    /// Direct sequential running average with prior.
    fn online_average(ids: &[u32], y: &[f64], a: f64, p: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..ids.len() {
            let (mut s, mut n) = (0.0, 0.0);
            for j in 0..k {
                if ids[j] == ids[k] {
                    s += y[j];
                    n += 1.0;
                }
            }
            out.push(if n + a > 0.0 { (s + a * p) / (n + a) } else { p });
        }
        out
    }

    proptest! {
        #[test]
        fn encoders_stay_in_target_prior_hull(
            rows in proptest::collection::vec((0u32..6, 0.0f64..1.0), 1..60),
            a in 0.1f64..5.0,
            p in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            let (ids, y): (Vec<u32>, Vec<f64>) = rows.into_iter().unzip();
            let lo = y.iter().copied().fold(p, f64::min) - 1e-12;
            let hi = y.iter().copied().fold(p, f64::max) + 1e-12;
            let perm = Permutation::random(ids.len(), seed, 0);
            let mut all = Vec::new();
            all.push(greedy_encode(&ids, &y, &cfg(TsMode::Greedy, a, p)).unwrap());
            all.push(leave_one_out_encode(&ids, &y, &cfg(TsMode::LeaveOneOut, a, p)).unwrap());
            all.push(ordered_encode(&ids, &y, &cfg(TsMode::Ordered, a, p), &perm).unwrap());
            for e in &all {
                prop_assert!(e.values.iter().all(|v| *v >= lo && *v <= hi));
            }
            if ids.len() >= 2 {
                let h = holdout_encode(&ids, &y, &cfg(TsMode::Holdout, a, p), seed).unwrap();
                prop_assert!(h.values.iter().all(|v| *v >= lo && *v <= hi));
            }
            // Apply-time value equals the greedy full-data value, except holdout.
            let g = &all[0];
            for e in &all[1..] {
                for c in 0..6u32 {
                    prop_assert!(close(e.table.value(c), g.table.value(c)));
                }
            }
        }

        #[test]
        fn ordered_identity_matches_online_average(
            rows in proptest::collection::vec((0u32..4, 0.0f64..1.0), 1..50),
            a in 0.1f64..3.0,
            p in 0.0f64..1.0,
        ) {
            let (ids, y): (Vec<u32>, Vec<f64>) = rows.into_iter().unzip();
            let e = ordered_encode(&ids, &y, &cfg(TsMode::Ordered, a, p), &Permutation::identity(ids.len())).unwrap();
            let o = online_average(&ids, &y, a, p);
            for (x, z) in e.values.iter().zip(&o) {
                prop_assert!((x - z).abs() < 1e-12);
            }
        }

        #[test]
        fn ordered_prefix_property(
            rows in proptest::collection::vec((0u32..4, 0.0f64..1.0), 2..40),
            seed in any::<u64>(),
            k in 0usize..40,
        ) {
            let (ids, y): (Vec<u32>, Vec<f64>) = rows.into_iter().unzip();
            let n = ids.len();
            let k = k % n;
            let perm = Permutation::random(n, seed, 1);
            let c = cfg(TsMode::Ordered, 1.0, 0.5);
            let base = ordered_encode(&ids, &y, &c, &perm).unwrap();
            // Modify every row after k in the permutation.
            let mut y2 = y.clone();
            let mut ids2 = ids.clone();
            for pos in perm.position(k) + 1..n {
                let j = perm.example_at(pos);
                y2[j] = 1.0 - y2[j] + 0.25;
                ids2[j] = (ids2[j] + 1) % 4;
            }
            let moved = ordered_encode(&ids2, &y2, &c, &perm).unwrap();
            prop_assert_eq!(base.values[k], moved.values[k]);
        }
    }
}
