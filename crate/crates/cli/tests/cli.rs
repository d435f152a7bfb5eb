use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latticegate"))
}

fn reference_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/cs_reference.conf")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = run(&["kappa", "--eta-perp", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn out_of_range_width_is_a_usage_error() {
    let out = run(&["kappa", "--eta-perp", "1.5", "--eta-par", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_with_nonconvergence() {
    let out = run(&[
        "kappa",
        "--eta-perp",
        "0.1",
        "--eta-par",
        "0.2",
        "--max-evals",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("did not converge"), "{err}");
}

#[test]
fn missing_config_is_an_io_error() {
    let out = run(&["budget", "--config", "/no/such/file.conf"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn kappa_reports_reference_value() {
    let v = stdout_json(&run(&["kappa", "--eta-perp", "0.1", "--eta-par", "0.2"]));
    assert_eq!(v["schema_version"], 1);
    assert!(close(v["kappa"].as_f64().unwrap(), -19.3282636, 1e-6));
    assert!(close(v["kappa_approx"].as_f64().unwrap(), 16.9012866, 1e-7));
    assert_eq!(v["provenance"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "kappa",
        "--eta-perp",
        "0.15",
        "--eta-par",
        "0.3",
        "--mc-samples",
        "20000",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_changes_hash_and_monte_carlo() {
    let base = [
        "kappa",
        "--eta-perp",
        "0.15",
        "--eta-par",
        "0.3",
        "--mc-samples",
        "20000",
    ];
    let a = stdout_json(&run(&[&base[..], &["--seed", "1"]].concat()));
    let b = stdout_json(&run(&[&base[..], &["--seed", "2"]].concat()));
    assert_ne!(
        a["provenance"]["config_hash"],
        b["provenance"]["config_hash"]
    );
    assert_ne!(a["monte_carlo"]["mean_f"], b["monte_carlo"]["mean_f"]);
    assert_eq!(a["kappa"], b["kappa"]);
}

#[test]
fn map_is_independent_of_thread_count() {
    let grid = [
        "map",
        "--eta-perp",
        "0.08:0.3:4",
        "--eta-par",
        "0.1,0.2,0.5",
    ];
    let one = run(&[&grid[..], &["--jobs", "1"]].concat());
    let eight = run(&[&grid[..], &["--jobs", "8"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn single_cell_map_matches_kappa() {
    let map = run(&["map", "--eta-perp", "0.1", "--eta-par", "0.2"]);
    let text = String::from_utf8(map.stdout).unwrap();
    assert!(text.starts_with("# schema_version=1\n"));
    let last = text.lines().last().unwrap();
    let cell: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    let v = stdout_json(&run(&["kappa", "--eta-perp", "0.1", "--eta-par", "0.2"]));
    assert_eq!(cell, v["kappa"].as_f64().unwrap());
}

#[test]
fn budget_reproduces_reference_scales() {
    let cfg = reference_config();
    let v = stdout_json(&run(&["budget", "--config", cfg.to_str().unwrap()]));
    let entry = |name: &str| {
        v["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["name"] == name)
            .unwrap_or_else(|| panic!("missing {name}"))["value"]
            .as_f64()
            .unwrap()
    };
    assert!(close(entry("nu_osc_perp"), 293e3, 0.01));
    assert!(close(entry("nu_osc_par"), 72e3, 0.02));
    assert!(close(entry("gamma_sup_over_2pi"), 258.7, 0.002));
    assert!(close(entry("i_cat_uw_per_cm2"), 0.1936, 0.002));
}

#[test]
fn gate_and_ensemble_agree_on_the_reference_point() {
    let cfg = reference_config();
    let cfg = cfg.to_str().unwrap();
    let gate = stdout_json(&run(&["gate", "--config", cfg]));
    let p11 = gate["rows"][2]["populations"]["11"].as_f64().unwrap();

    let out = run(&[
        "ensemble",
        "--config",
        cfg,
        "--sites",
        "200000",
        "--bootstrap",
        "40",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let field = |stage: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(stage)).unwrap();
        line.split(',').nth(5).unwrap().parse().unwrap()
    };
    let corrected = field("corrected,");
    let err = field("corrected_stderr,");
    assert!(
        (corrected - p11).abs() < 4.0 * err,
        "{corrected} vs {p11} ± {err}"
    );
    assert!((field("gate,") - p11).abs() < 1e-8);
}

#[test]
fn explicit_rates_need_both_shift_and_scattering() {
    let out = run(&["gate", "--vdd-over-h", "5000"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&run(&[
        "gate",
        "--vdd-over-h",
        "5000",
        "--gamma-single",
        "0",
        "--gamma-dd",
        "0",
    ]));
    assert!(v["mean_fidelity"].as_f64().unwrap() > 0.98);
}

#[test]
fn writes_to_file_when_asked() {
    let dir = std::env::temp_dir().join(format!("latticegate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k.json");
    let out = run(&[
        "kappa",
        "--eta-perp",
        "0.1",
        "--eta-par",
        "0.2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "kappa");
    std::fs::remove_dir_all(&dir).ok();
}
