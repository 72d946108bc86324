//! Prediction shift of two-step boosting with decision stumps.
//!
//! Features `x = (x1, x2)` are uniform on `{0,1}^2` and `y = c1 x1 + c2 x2`.
//! Stump `h1` splits on `x1` and is fit to `y`; stump `h2` splits on `x2` and
//! is fit to the residuals `y - h1(x)`. With the same data for both steps,
//! `E[h1 + h2 | A] = f*(x) - c2 (t - 1/2) / (n - 1)` at `x = (s, t)`; with
//! independent samples the expectation is exactly `f*(x)`. `A` is the event
//! that every stump leaf contains a training example.
//!
//! Exact expectations enumerate the cell counts `xi_st` (examples equal to
//! `(s, t)`) with multinomial weights in rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::{self, Domain};
use crate::target_stats::{greedy_encode, leave_one_out_encode, TsConfig, TsMode};

/// Cell index `2 s + t` of the point `(s, t)`.
const POINTS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

pub const BRUTE_FORCE_MAX_N: usize = 9;
pub const CLOSED_FORM_MAX_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoStumpConfig {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    /// Fit both stumps on one sample instead of two independent ones.
    pub shared_data: bool,
    /// Number of accepted (event `A`) replicates.
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointBias {
    pub s: u8,
    pub t: u8,
    /// Mean of `F2(x) - f*(x)` over replicates.
    pub bias: f64,
    pub standard_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub config: TwoStumpConfig,
    pub points: Vec<PointBias>,
    pub replicates: usize,
    /// Draws discarded because some stump leaf was empty.
    pub rejected: u64,
}

impl BiasReport {
    pub fn point(&self, s: u8, t: u8) -> &PointBias {
        &self.points[usize::from(2 * s + t)]
    }
}

/// Shift predicted for shared data: `-c2 (t - 1/2) / (n - 1)`.
pub fn predicted_shift(n: usize, c2: f64, t: u8) -> f64 {
    -c2 * (f64::from(t) - 0.5) / (n as f64 - 1.0)
}

fn target(c1: f64, c2: f64, s: u8, t: u8) -> f64 {
    c1 * f64::from(s) + c2 * f64::from(t)
}

#[derive(Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: [f64; 4],
    m2: [f64; 4],
}

impl Moments {
    fn push(&mut self, v: [f64; 4]) {
        self.count += 1.0;
        for i in 0..4 {
            let d = v[i] - self.mean[i];
            self.mean[i] += d / self.count;
            self.m2[i] += d * (v[i] - self.mean[i]);
        }
    }

    fn merge(&mut self, o: &Moments) {
        if o.count == 0.0 {
            return;
        }
        let n = self.count + o.count;
        for i in 0..4 {
            let d = o.mean[i] - self.mean[i];
            self.mean[i] += d * o.count / n;
            self.m2[i] += o.m2[i] + d * d * self.count * o.count / n;
        }
        self.count = n;
    }
}

/// Draws `n` points; returns per-cell counts and the points.
fn draw(rng: &mut impl Rng, n: usize, out: &mut Vec<u8>) {
    out.clear();
    let mut bits = 0u64;
    for i in 0..n {
        if i % 32 == 0 {
            bits = rng.gen();
        }
        out.push((bits & 3) as u8);
        bits >>= 2;
    }
}

/// Leaf means of `values` split by `key(point)`; `None` when a leaf is empty.
fn leaf_means(points: &[u8], key: impl Fn(u8) -> usize, value: impl Fn(u8) -> f64) -> Option<[f64; 2]> {
    let mut sum = [0.0; 2];
    let mut cnt = [0usize; 2];
    for &p in points {
        let k = key(p);
        sum[k] += value(p);
        cnt[k] += 1;
    }
    (cnt[0] > 0 && cnt[1] > 0).then(|| [sum[0] / cnt[0] as f64, sum[1] / cnt[1] as f64])
}

/// Monte Carlo estimate of `E[F2(x) | A] - f*(x)` for all four points.
pub fn simulate_two_stumps(cfg: &TwoStumpConfig) -> Result<BiasReport> {
    const CHUNK: usize = 4096;
    if cfg.n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {}", cfg.n)));
    }
    if cfg.replicates == 0 {
        return Err(Error::invalid("no replicates requested"));
    }
    if !(cfg.c1.abs() > cfg.c2.abs()) {
        return Err(Error::invalid("the first stump must split on the stronger feature: |c1| > |c2|"));
    }
    let (c1, c2) = (cfg.c1, cfg.c2);
    let x1 = |p: u8| usize::from(p >> 1);
    let x2 = |p: u8| usize::from(p & 1);
    let y = |p: u8| target(c1, c2, p >> 1, p & 1);
    let chunks = cfg.replicates.div_ceil(CHUNK);
    let parts: Vec<(Moments, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let want = CHUNK.min(cfg.replicates - c * CHUNK);
            let mut rng = random::stream(cfg.seed, Domain::MonteCarlo, c as u64);
            let mut acc = Moments::default();
            let mut rejected = 0u64;
            let (mut d1, mut d2) = (Vec::with_capacity(cfg.n), Vec::with_capacity(cfg.n));
            while (acc.count as usize) < want {
                draw(&mut rng, cfg.n, &mut d1);
                if !cfg.shared_data {
                    draw(&mut rng, cfg.n, &mut d2);
                }
                let second = if cfg.shared_data { &d1 } else { &d2 };
                let fitted = leaf_means(&d1, x1, y).and_then(|h1| {
                    leaf_means(second, x2, |p| y(p) - h1[x1(p)]).map(|h2| (h1, h2))
                });
                match fitted {
                    Some((h1, h2)) => {
                        let mut v = [0.0; 4];
                        for (i, &(s, t)) in POINTS.iter().enumerate() {
                            v[i] = h1[usize::from(s)] + h2[usize::from(t)] - target(c1, c2, s, t);
                        }
                        acc.push(v);
                    }
                    None => rejected += 1,
                }
            }
            (acc, rejected)
        })
        .collect();
    let mut total = Moments::default();
    let mut rejected = 0;
    for (m, r) in &parts {
        total.merge(m);
        rejected += r;
    }
    let r = total.count;
    let points = POINTS
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| PointBias {
            s,
            t,
            bias: total.mean[i],
            standard_error: if r > 1.0 { (total.m2[i] / (r - 1.0) / r).sqrt() } else { 0.0 },
        })
        .collect();
    Ok(BiasReport {
        config: cfg.clone(),
        points,
        replicates: r as usize,
        rejected,
    })
}

fn rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::invalid(format!("non-finite coefficient {v}")))
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Calls `f(counts, probability)` for each way of spreading `m` uniform
/// examples over the four cells.
fn for_each_counts(m: usize, mut f: impl FnMut([usize; 4], &BigRational)) {
    let mut fact = vec![BigInt::one()];
    for i in 1..=m {
        let next = &fact[i - 1] * BigInt::from(i);
        fact.push(next);
    }
    let total = BigInt::from(4u32).pow(m as u32);
    for a in 0..=m {
        for b in 0..=m - a {
            for c in 0..=m - a - b {
                let d = m - a - b - c;
                let ways = &fact[m] / (&fact[a] * &fact[b] * &fact[c] * &fact[d]);
                f([a, b, c, d], &BigRational::new(ways, total.clone()));
            }
        }
    }
}

fn both_x1(c: &[usize; 4]) -> bool {
    c[0] + c[1] > 0 && c[2] + c[3] > 0
}

fn both_x2(c: &[usize; 4]) -> bool {
    c[0] + c[2] > 0 && c[1] + c[3] > 0
}

/// `E[value(counts) | fixed examples, A?]` where `fixed` lists the cells of
/// the conditioned examples and the remaining `m` examples are uniform.
fn conditional_expectation(
    fixed: &[usize],
    m: usize,
    condition_on_a: bool,
    value: impl Fn(&[usize; 4]) -> BigRational,
) -> BigRational {
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for_each_counts(m, |mut c, p| {
        for &cell in fixed {
            c[cell] += 1;
        }
        if condition_on_a && !(both_x1(&c) && both_x2(&c)) {
            return;
        }
        num += p * value(&c);
        den += p;
    });
    num / den
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactPoint {
    pub s: u8,
    pub t: u8,
    pub expectation: BigRational,
    pub bias: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactBias {
    pub n: usize,
    pub shared_data: bool,
    /// Sum of all enumerated probabilities before conditioning.
    pub total_probability: BigRational,
    pub prob_a: BigRational,
    pub points: Vec<ExactPoint>,
}

impl ExactBias {
    pub fn point(&self, s: u8, t: u8) -> &ExactPoint {
        &self.points[usize::from(2 * s + t)]
    }
}

/// Stump means `h1(s)` from cell counts, with targets `f[cell]`.
fn h1_of(c: &[usize; 4], f: &[BigRational; 4]) -> [BigRational; 2] {
    [0usize, 1].map(|s| {
        let (a, b) = (2 * s, 2 * s + 1);
        (int(c[a]) * &f[a] + int(c[b]) * &f[b]) / int(c[a] + c[b])
    })
}

/// Exact `E[F2(x) | A]` by enumeration over all datasets of size `n`.
pub fn brute_force_bias(n: usize, c1: f64, c2: f64, shared_data: bool) -> Result<ExactBias> {
    if !(2..=BRUTE_FORCE_MAX_N).contains(&n) {
        return Err(Error::invalid(format!("exact enumeration supports 2 <= n <= {BRUTE_FORCE_MAX_N}, got {n}")));
    }
    let (c1, c2) = (rational(c1)?, rational(c2)?);
    let f: [BigRational; 4] = POINTS.map(|(s, t)| &c1 * int(usize::from(s)) + &c2 * int(usize::from(t)));
    let mut total = BigRational::zero();
    let mut expectation: [BigRational; 4] = Default::default();
    let prob_a;

    if shared_data {
        let mut pa = BigRational::zero();
        for_each_counts(n, |c, p| {
            total += p;
            if !(both_x1(&c) && both_x2(&c)) {
                return;
            }
            pa += p;
            let h1 = h1_of(&c, &f);
            let resid: Vec<BigRational> = (0..4).map(|cell| &f[cell] - &h1[cell >> 1]).collect();
            let h2 = [0usize, 1].map(|t| {
                let (a, b) = (t, 2 + t);
                (int(c[a]) * &resid[a] + int(c[b]) * &resid[b]) / int(c[a] + c[b])
            });
            for (cell, (s, t)) in POINTS.iter().enumerate() {
                expectation[cell] += p * (&h1[usize::from(*s)] + &h2[usize::from(*t)]);
            }
        });
        for e in &mut expectation {
            *e = &*e / &pa;
        }
        prob_a = pa;
    } else {
        // The two samples are independent, so the expectation of each
        // product term factorizes over them.
        let mut p1 = BigRational::zero();
        let mut e_h1: [BigRational; 2] = Default::default();
        let mut e_resid: [BigRational; 4] = Default::default();
        for_each_counts(n, |c, p| {
            total += p;
            if !both_x1(&c) {
                return;
            }
            p1 += p;
            let h1 = h1_of(&c, &f);
            for s in 0..2 {
                e_h1[s] += p * &h1[s];
            }
            for cell in 0..4 {
                e_resid[cell] += p * (&f[cell] - &h1[cell >> 1]);
            }
        });
        let mut p2 = BigRational::zero();
        let mut e_share: [BigRational; 4] = Default::default();
        for_each_counts(n, |c, p| {
            if !both_x2(&c) {
                return;
            }
            p2 += p;
            for cell in 0..4 {
                let t = cell & 1;
                e_share[cell] += p * ratio(c[cell], c[t] + c[2 + t]);
            }
        });
        for (cell, (s, t)) in POINTS.iter().enumerate() {
            let t = usize::from(*t);
            let h2 = &e_share[t] / &p2 * (&e_resid[t] / &p1) + &e_share[2 + t] / &p2 * (&e_resid[2 + t] / &p1);
            expectation[cell] = &e_h1[usize::from(*s)] / &p1 + h2;
        }
        prob_a = p1 * p2;
    }

    let points = POINTS
        .iter()
        .enumerate()
        .map(|(cell, &(s, t))| ExactPoint {
            s,
            t,
            bias: &expectation[cell] - &f[cell],
            expectation: expectation[cell].clone(),
        })
        .collect();
    Ok(ExactBias {
        n,
        shared_data,
        total_probability: total,
        prob_a,
        points,
    })
}

/// An enumerated expectation next to its closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormCheck {
    pub name: &'static str,
    pub condition: String,
    pub exact: BigRational,
    pub closed_form: BigRational,
    /// Allowed absolute deviation; zero for identities.
    pub slack: f64,
}

impl ClosedFormCheck {
    pub fn deviation(&self) -> f64 {
        to_f64(&(&self.exact - &self.closed_form)).abs()
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.deviation() <= self.slack + tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormReport {
    pub n: usize,
    pub checks: Vec<ClosedFormCheck>,
}

fn pow2(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(2u32).pow(k as u32))
}

/// Exact expectations behind the shift derivation for sample size `n`:
///
/// * `E[1/(xi_s0 + xi_s1) | x_1 = (s,t), A] = 2/n`;
/// * `E[1/(xi_s0 + xi_s1) | x_1 = (s,t1), x_2 = (s,t2), A]
///   = (2/n)(1 - 1/(n-1) + (n-2)/((2^{n-1}-2)(n-1)))`;
/// * `E[1/(xi_01 + xi_11) | x_1 = (0,0), x_2 = (0,1)] = 2/(n-1) - 1/(2^{n-2}(n-1))`;
/// * on a training example, `E[h1(x_l) | x_l = (s,t), A]
///   = c1 s + c2/2 + c2 (2t-1)/n + O(2^-n)`, here with `c1 = 2`, `c2 = 1`.
///
/// At `n = 2` the two-example conditioning has probability zero, so that
/// family is omitted.
pub fn closed_form_checks(n: usize) -> Result<ClosedFormReport> {
    if !(2..=CLOSED_FORM_MAX_N).contains(&n) {
        return Err(Error::invalid(format!("closed-form checks support 2 <= n <= {CLOSED_FORM_MAX_N}, got {n}")));
    }
    let one = BigRational::one();
    let mut checks = Vec::new();

    for (cell, (s, t)) in POINTS.iter().enumerate() {
        let s_cells = [2 * usize::from(*s), 2 * usize::from(*s) + 1];
        checks.push(ClosedFormCheck {
            name: "inverse leaf size given one example",
            condition: format!("x1=({s},{t})"),
            exact: conditional_expectation(&[cell], n - 1, true, |c| ratio(1, c[s_cells[0]] + c[s_cells[1]])),
            closed_form: ratio(2, n),
            slack: 0.0,
        });
    }

    for s in (0..2usize).filter(|_| n >= 3) {
        let l2 = ratio(2, n)
            * (&one - ratio(1, n - 1) + ratio(n - 2, 1) / ((pow2(n - 1) - int(2)) * int(n - 1)));
        for t1 in 0..2usize {
            for t2 in 0..2usize {
                checks.push(ClosedFormCheck {
                    name: "inverse leaf size given two examples",
                    condition: format!("x1=({s},{t1}), x2=({s},{t2})"),
                    exact: conditional_expectation(&[2 * s + t1, 2 * s + t2], n - 2, true, |c| {
                        ratio(1, c[2 * s] + c[2 * s + 1])
                    }),
                    closed_form: l2.clone(),
                    slack: 0.0,
                });
            }
        }
    }

    checks.push(ClosedFormCheck {
        name: "inverse x2 leaf size",
        condition: "x1=(0,0), x2=(0,1)".into(),
        exact: conditional_expectation(&[0, 1], n - 2, false, |c| ratio(1, c[1] + c[3])),
        closed_form: ratio(2, n - 1) - &one / (pow2(n - 2) * int(n - 1)),
        slack: 0.0,
    });

    let (c1, c2) = (2usize, 1usize);
    for (cell, (s, t)) in POINTS.iter().enumerate() {
        let (s, t) = (usize::from(*s), usize::from(*t));
        let exact = conditional_expectation(&[cell], n - 1, true, |c| {
            int(c1 * s) + ratio(c2 * c[2 * s + 1], c[2 * s] + c[2 * s + 1])
        });
        let closed = int(c1 * s) + ratio(c2, 2) + (int(2 * t) - &one) * ratio(c2, n);
        checks.push(ClosedFormCheck {
            name: "first stump on a training example",
            condition: format!("x_l=({s},{t})"),
            exact,
            closed_form: closed,
            slack: c2 as f64 * 0.5f64.powi(n as i32),
        });
    }
    Ok(ClosedFormReport { n, checks })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub greedy_threshold: f64,
    pub greedy_train_accuracy: f64,
    pub greedy_test_accuracy: f64,
    pub loo_threshold: f64,
    /// Whether the leave-one-out rule predicts 1 below the threshold.
    pub loo_predicts_one_below: bool,
    pub loo_train_accuracy: f64,
    pub loo_test_accuracy: f64,
}

fn accuracy(pred: impl Iterator<Item = bool>, y: &[f64]) -> f64 {
    let hits = pred.zip(y).filter(|(p, &y)| *p == (y == 1.0)).count();
    hits as f64 / y.len() as f64
}

/// Two constructions where non-ordered statistics leak the target.
///
/// Greedy: every category is unique and `P(y = 1) = 1/2`. The encoding is
/// `(y + a p)/(1 + a)` on train and `p` on test, so the threshold
/// `(1/2 + a p)/(1 + a)` separates train perfectly and is uninformative on test.
///
/// Leave-one-out: a constant feature encodes to `(n+ - y + a p)/(n - 1 + a)`,
/// so the threshold `(n+ - 1/2 + a p)/(n - 1 + a)` separates train perfectly.
pub fn ts_leakage_demo(n_train: usize, n_test: usize, a: f64, p: f64, seed: u64) -> Result<LeakageReport> {
    if n_train < 2 || n_test < 1 {
        return Err(Error::invalid("leakage demo needs at least 2 training and 1 test rows"));
    }
    let mut rng = random::stream(seed, Domain::Experiment, 0);
    let mut labels = |n: usize| -> Vec<f64> { (0..n).map(|_| f64::from(rng.gen_bool(0.5))).collect() };
    let y_train = labels(n_train);
    let y_test = labels(n_test);

    let unique: Vec<u32> = (0..n_train as u32).collect();
    let g = greedy_encode(&unique, &y_train, &TsConfig::new(TsMode::Greedy, a, p)?)?;
    let greedy_threshold = (0.5 + a * p) / (1.0 + a);
    // Test categories never occur in training.
    let test_value = g.table.value(u32::MAX);
    let greedy_train_accuracy = accuracy(g.values.iter().map(|&v| v > greedy_threshold), &y_train);
    let greedy_test_accuracy = accuracy(std::iter::repeat(test_value > greedy_threshold), &y_test);

    let constant = vec![0u32; n_train];
    let l = leave_one_out_encode(&constant, &y_train, &TsConfig::new(TsMode::LeaveOneOut, a, p)?)?;
    let n_pos: f64 = y_train.iter().sum();
    let loo_threshold = (n_pos - 0.5 + a * p) / (n_train as f64 - 1.0 + a);
    let below = accuracy(l.values.iter().map(|&v| v < loo_threshold), &y_train);
    let above = accuracy(l.values.iter().map(|&v| v > loo_threshold), &y_train);
    let loo_predicts_one_below = below >= above;
    let rule = |v: f64| if loo_predicts_one_below { v < loo_threshold } else { v > loo_threshold };
    let apply_value = l.table.value(0);

    Ok(LeakageReport {
        greedy_threshold,
        greedy_train_accuracy,
        greedy_test_accuracy,
        loo_threshold,
        loo_predicts_one_below,
        loo_train_accuracy: below.max(above),
        loo_test_accuracy: accuracy(std::iter::repeat(rule(apply_value)), &y_test),
    })
}
