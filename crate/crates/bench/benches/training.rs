use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use ordboost::synth::{high_cardinality, HighCardinalityConfig};
use ordboost::target_stats::{greedy_encode, ordered_encode, TsConfig};
use ordboost::{BoostParams, Dataset, Mode, Permutation, Trainer, TsMode};

fn data(rows: usize) -> Dataset {
    let cfg = HighCardinalityConfig { n_rows: rows, n_categories: rows / 10, ..Default::default() };
    high_cardinality(&cfg, 0).unwrap()
}

fn train_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("train_step");
    group.sample_size(10);
    for rows in [2_000, 20_000] {
        let d = data(rows);
        for (name, mode, s) in [("plain", Mode::Plain, 1), ("ordered_s1", Mode::Ordered, 1), ("ordered_s4", Mode::Ordered, 4)] {
            let params = BoostParams { mode, permutations: s, iterations: 1, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, rows), &d, |b, d| {
                b.iter_batched(
                    || Trainer::new(d, params.clone()).unwrap(),
                    |mut t| {
                        t.step().unwrap();
                        t
                    },
                    BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

fn target_statistics(c: &mut Criterion) {
    let mut group = c.benchmark_group("target_statistics");
    let d = data(100_000);
    let (ids, y) = (d.categorical(0), d.targets());
    let perm = Permutation::random(d.n_rows(), 0, 0);
    let ordered = TsConfig::with_mean_prior(TsMode::Ordered, 1.0, y).unwrap();
    let greedy = TsConfig::with_mean_prior(TsMode::Greedy, 1.0, y).unwrap();
    group.bench_function("ordered_100k", |b| b.iter(|| ordered_encode(black_box(ids), y, &ordered, &perm).unwrap()));
    group.bench_function("greedy_100k", |b| b.iter(|| greedy_encode(black_box(ids), y, &greedy).unwrap()));
    group.finish();
}

fn predict(c: &mut Criterion) {
    let d = data(20_000);
    let params = BoostParams { iterations: 50, ..Default::default() };
    let model = ordboost::train(&d, &params).unwrap();
    c.bench_function("predict_20k_50_trees", |b| b.iter(|| model.predict(black_box(&d)).unwrap()));
}

criterion_group!(benches, train_step, target_statistics, predict);
criterion_main!(benches);
