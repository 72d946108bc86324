use ordboost::boosting::{bootstrap_weights, OrderedModels};
use ordboost::tree::{get_leaf, TsContext};
use ordboost::{eval_metrics, train, BoostParams, Dataset, Loss, Mode, ObliviousTree, Permutation, SplitAttribute, SplitSource};
use proptest::prelude::*;

proptest! {
    #[test]
    fn bootstrap_weights_average_one(n in 1usize..300, t in 0.0f64..1.0, seed: u64) {
        let w = bootstrap_weights(n, 1.0, seed).unwrap();
        prop_assert!((w.iter().sum::<f64>() - n as f64).abs() < 1e-9 * n as f64);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        let tw = bootstrap_weights(n, t, seed).unwrap();
        for (a, b) in w.iter().zip(&tw) {
            prop_assert!((a.powf(t) - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn leaf_is_bit_sum(x in prop::collection::vec(-5.0f64..5.0, 4), thresholds in prop::collection::vec(-5.0f64..5.0, 0..5)) {
        let splits: Vec<SplitAttribute> = thresholds
            .iter()
            .enumerate()
            .map(|(i, &t)| SplitAttribute { source: SplitSource::Numeric { feature: (i % 4) as u32 }, threshold: t })
            .collect();
        let tree = ObliviousTree::new(splits).unwrap();
        let leaf = get_leaf(&tree, &x, &TsContext::Apply(&[])).unwrap();
        let expect: usize = thresholds.iter().enumerate().map(|(i, &t)| usize::from(x[i % 4] > t) << i).sum();
        prop_assert_eq!(leaf, expect);
        prop_assert!(leaf < tree.leaf_count());
    }

    #[test]
    fn permutation_inverse(n in 1usize..500, seed: u64, stream in 0u64..10) {
        let p = Permutation::random(n, seed, stream);
        for k in 0..n {
            prop_assert_eq!(p.position(p.example_at(k)), k);
        }
    }

    #[test]
    fn metric_ranges(scores in prop::collection::vec(-50.0f64..50.0, 1..100), seed: u64) {
        let labels: Vec<f64> = scores.iter().enumerate().map(|(i, _)| f64::from((seed >> (i % 64)) & 1 == 1)).collect();
        let m = eval_metrics(&scores, &labels).unwrap();
        prop_assert!(m.logloss >= 0.0);
        prop_assert!((0.0..=1.0).contains(&m.zero_one));
        prop_assert_eq!(m.n_eval, scores.len());
    }

    #[test]
    fn ordered_storage_bound(n in 1usize..5000, s in 1usize..10) {
        let stored = OrderedModels::new(n, s).stored_count();
        prop_assert!(n + stored <= 8 * (s + 1) * n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn model_round_trip_is_bit_exact(
        rows in prop::collection::vec((0.0f64..1.0, 0u32..5, prop::bool::ANY), 8..60),
        ordered: bool,
        seed: u64,
    ) {
        let d = Dataset::builder()
            .numeric("x", rows.iter().map(|r| r.0).collect())
            .categorical_ids("c", rows.iter().map(|r| r.1).collect(), 5)
            .target("y", rows.iter().map(|r| f64::from(r.2)).collect())
            .build()
            .unwrap();
        let mode = if ordered { Mode::Ordered } else { Mode::Plain };
        let p = BoostParams { mode, iterations: 4, depth: 3, loss: Loss::Logloss, seed, ..Default::default() };
        let m = train(&d, &p).unwrap();
        let back = ordboost::TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
        let (a, b) = (m.predict(&d).unwrap(), back.predict(&d).unwrap());
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
