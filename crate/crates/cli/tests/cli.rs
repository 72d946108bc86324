use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ordboost::shift_lab::BiasReport;
use ordboost::synth::{high_cardinality, HighCardinalityConfig};
use ordboost::{Dataset, TrainedModel};
use ordboost_cli::commands;

fn ordboost(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordboost")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn numeric_csv(dir: &Path) -> PathBuf {
    let data = ordboost::synth::regression(400, 3, 0.1, 1).unwrap();
    let y: Vec<f64> = data.targets().iter().map(|&v| f64::from(v > 0.0)).collect();
    let mut b = Dataset::builder();
    for f in 0..3 {
        b = b.numeric(format!("x{f}"), data.numeric(f).to_vec());
    }
    let path = dir.join("numeric.csv");
    b.target("y", y).build().unwrap().write_csv(&path).unwrap();
    path
}

fn categorical_csv(dir: &Path, rows: usize, seed: u64) -> PathBuf {
    let cfg = HighCardinalityConfig { n_rows: rows, n_categories: 50, ..Default::default() };
    let path = dir.join(format!("cat{seed}.csv"));
    high_cardinality(&cfg, seed).unwrap().write_csv(&path).unwrap();
    path
}

#[test]
fn predict_reproduces_logged_training_loss() {
    let dir = tempfile::tempdir().unwrap();
    let data = numeric_csv(dir.path());
    let config = write(dir.path(), "c.json", r#"{"params":{"iterations":30,"discard_fraction":0.0}}"#);
    let (model, pred) = (dir.path().join("m.bin"), dir.path().join("p.csv"));
    assert!(ordboost(&[&"train", &"--config", &config, &"--data", &data, &"--out", &model]).status.success());
    assert!(ordboost(&[&"predict", &"--model", &model, &"--data", &data, &"--out", &pred]).status.success());
    let out = ordboost(&[&"eval", &"--pred", &pred, &"--data", &data]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let mut log = csv::Reader::from_path(commands::log_path(&model)).unwrap();
    let rows: Vec<csv::StringRecord> = log.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 30);
    let last: f64 = rows[29][1].parse().unwrap();
    let logloss = report["logloss"].as_f64().unwrap();
    assert!((logloss - last).abs() <= 1e-9, "eval {logloss} vs log {last}");
}

#[test]
fn schema_mismatch_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = numeric_csv(dir.path());
    let config = write(dir.path(), "c.json", r#"{"params":{"iterations":3}}"#);
    let model = dir.path().join("m.bin");
    assert!(ordboost(&[&"train", &"--config", &config, &"--data", &data, &"--out", &model]).status.success());
    let other = write(dir.path(), "other.csv", "x0,x9,x2,y\n0.1,0.2,0.3,1\n");
    let out = ordboost(&[&"predict", &"--model", &model, &"--data", &other, &"--out", &dir.path().join("p.csv")]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    let pred = write(dir.path(), "p.csv", "score\n0.5\n");
    let out = ordboost(&[&"eval", &"--pred", &pred, &"--data", &other, &"--target", &"label"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", "{}");
    let out = ordboost(&[&"train", &"--config", &config, &"--data", &dir.path().join("none.csv"), &"--out", &dir.path().join("m")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn saved_model_loads_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let data = categorical_csv(dir.path(), 600, 4);
    let config = write(
        dir.path(),
        "c.json",
        r#"{"categorical":["cat"],"params":{"iterations":10,"permutations":2}}"#,
    );
    let model_path = dir.path().join("m.bin");
    let trained = commands::train(&config, &data, &model_path, None).unwrap();
    let loaded = TrainedModel::load(&model_path).unwrap();
    assert_eq!(serde_json::to_string(&loaded).unwrap(), serde_json::to_string(&trained).unwrap());
    let a = commands::predict(&model_path, &data, &dir.path().join("p.csv")).unwrap();
    let rows = commands::load_for_model(&data, &trained).unwrap();
    let b = trained.predict(&rows).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = numeric_csv(dir.path());
    let config = write(dir.path(), "c.json", r#"{"params":{"iterashuns":3}}"#);
    let out = ordboost(&[&"train", &"--config", &config, &"--data", &data, &"--out", &dir.path().join("m")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("iterashuns"));
}

#[test]
fn shift_experiment_writes_the_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"experiment":{"shift":{"n":8,"c1":2.0,"c2":1.0,"shared_data":true,"replicates":5000,"seed":3}}}"#,
    );
    let out_dir = dir.path().join("out");
    assert!(ordboost(&[&"experiment", &"--kind", &"shift", &"--config", &config, &"--out", &out_dir]).status.success());
    let written: BiasReport = serde_json::from_str(&std::fs::read_to_string(out_dir.join("shift.json")).unwrap()).unwrap();
    let cfg = ordboost_cli::RunConfig::load(&config).unwrap();
    let direct = ordboost::shift_lab::simulate_two_stumps(&cfg.experiment.shift).unwrap();
    assert_eq!(written, direct);

    let mut rows = csv::Reader::from_path(out_dir.join("shift.csv")).unwrap();
    let header = rows.headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["s", "t", "bias", "standard_error", "predicted", "config_hash"]);
    let records: Vec<_> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r[5] == cfg.hash()));
}

#[test]
fn permutation_grid_reports_each_setting() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"params":{"iterations":5,"depth":3},
            "experiment":{"seeds":[0,1],"permutations":[1,2,4],
                          "synthetic":{"n_rows":500,"n_categories":40}}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = ordboost(&[&"experiment", &"--kind", &"permutations", &"--config", &config, &"--out", &out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let names: Vec<&str> = summary["variants"].as_array().unwrap().iter().map(|v| v["variant"].as_str().unwrap()).collect();
    assert_eq!(names, ["s=1", "s=2", "s=4"]);
    assert_eq!(summary["variants"][0]["logloss_rel_pct"].as_f64(), Some(0.0));
    let results = csv::Reader::from_path(out_dir.join("results.csv")).unwrap().records().count();
    assert_eq!(results, 6);
}

#[test]
fn unknown_experiment_kind_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", "{}");
    let out = ordboost(&[&"experiment", &"--kind", &"bogus", &"--config", &config, &"--out", &dir.path().join("o")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn experiments_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"params":{"iterations":5,"depth":3},
            "experiment":{"seeds":[3],"synthetic":{"n_rows":400,"n_categories":30}}}"#,
    );
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        assert!(ordboost(&[&"experiment", &"--kind", &"ts-compare", &"--config", &config, &"--out", &out_dir]).status.success());
        std::fs::read(out_dir.join("results.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn synth_writes_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    assert!(ordboost(&[&"synth", &"--kind", &"high-cardinality", &"--rows", &"123", &"--out", &out]).status.success());
    assert_eq!(csv::Reader::from_path(&out).unwrap().records().count(), 123);
}
