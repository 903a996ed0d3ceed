use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use promptevo::orchestrator::RunConfig;

fn promptevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_promptevo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn example_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml")
}

/// A small but complete configuration for quick runs.
fn quick_config(dir: &Path) -> PathBuf {
    let path = dir.join("quick.toml");
    std::fs::write(
        &path,
        "[cma]\nmax_generations = 4\n[baseline]\ncount = 20\n[evaluator]\ngrid_resolution = 64\n[similarity]\nword_count = 6\npoints = 256\n",
    )
    .unwrap();
    path
}

fn stdout_path(out: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8(out.stdout.clone()).unwrap().trim())
}

#[test]
fn example_config_is_the_defaults() {
    assert_eq!(RunConfig::load(example_config()).unwrap(), RunConfig::default());
}

#[test]
fn printed_config_parses_back() {
    let out = promptevo(&["config"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(RunConfig::from_toml(&text).unwrap(), RunConfig::default());
}

#[test]
fn optimize_twice_gives_identical_logs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = quick_config(tmp.path());
    let out_dir = tmp.path().join("runs");
    let args = [
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ];
    let a = promptevo(&args);
    let b = promptevo(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success());
    let (da, db) = (stdout_path(&a), stdout_path(&b));
    assert_ne!(da, db);
    assert!(da.ends_with("optimize-s7-001"));
    for file in ["runlog.json", "records.jsonl", "generations.jsonl", "config.toml", "baseline.json"] {
        let fa = std::fs::read(da.join(file)).unwrap();
        assert_eq!(fa, std::fs::read(db.join(file)).unwrap(), "{file}");
    }
    let snapshot = RunConfig::load(da.join("config.toml")).unwrap();
    assert_eq!(snapshot.seed, 7);

    let report = promptevo(&["report", "--run", da.to_str().unwrap()]);
    assert!(report.status.success());
    for csv in ["generations.csv", "genome_stats.csv", "designs.csv"] {
        assert!(da.join(csv).exists(), "{csv}");
    }
    let rows = std::fs::read_to_string(da.join("generations.csv")).unwrap();
    assert_eq!(rows.lines().count(), 5);
}

#[test]
fn baseline_then_optimize_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let config = quick_config(tmp.path());
    let out_dir = tmp.path().join("runs");
    let base = promptevo(&[
        "baseline",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(base.status.success(), "{}", String::from_utf8_lossy(&base.stderr));
    let base_dir = stdout_path(&base);
    assert!(base_dir.join("baseline.json").exists());

    let opt = promptevo(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--baseline",
        base_dir.to_str().unwrap(),
        "--strategy",
        "plus",
        "--representation",
        "token",
    ]);
    assert!(opt.status.success(), "{}", String::from_utf8_lossy(&opt.stderr));
    assert_eq!(
        std::fs::read(base_dir.join("baseline.json")).unwrap(),
        std::fs::read(stdout_path(&opt).join("baseline.json")).unwrap()
    );
}

#[test]
fn similarity_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let config = quick_config(tmp.path());
    let out = promptevo(&[
        "similarity",
        "--config",
        config.to_str().unwrap(),
        "--out",
        tmp.path().join("runs").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(stdout_path(&out).join("similarity.csv")).unwrap();
    assert!(csv.starts_with("word,pos,wup,chamfer,status"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn missing_config_is_a_config_error() {
    let out = promptevo(&["optimize", "--config", "/no/such/run.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/run.toml"));
}

#[test]
fn invalid_config_and_flags_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[cma]\nmu = 50\n").unwrap();
    assert_eq!(promptevo(&["optimize", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(promptevo(&["optimize", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(promptevo(&["optimize", "--strategy", "sideways"]).status.code(), Some(1));
    assert_eq!(promptevo(&[]).status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = promptevo(&["report", "--run", tmp.path().join("nothing").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let config = tmp.path().join("ext.toml");
    std::fs::write(
        &config,
        "[generator]\nbackend = \"external\"\ncommand = [\"/definitely/missing/bridge\"]\n[baseline]\ncount = 4\n",
    )
    .unwrap();
    let out = promptevo(&["baseline", "--config", config.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
