//! End-to-end CLI behavior: exit codes, output files, and witness-reference
//! integrity.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_greedylab")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("greedylab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(exe()).args(args).output().unwrap()
}

#[test]
fn unknown_basis_id_exits_2() {
    let out = run(&["params", "--basis", "nonsense:8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_basis_flag_exits_2() {
    let out = run(&["params"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_grid_k_exits_2() {
    let dir = scratch("gridk");
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{"grid":{"s":2.0,"K":0,"levels":6}}"#).unwrap();
    let out = run(&[
        "thresholds",
        "--basis",
        "lp:1.0:4",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = scratch("badcfg");
    let config = dir.join("config.json");
    std::fs::write(&config, "{not json").unwrap();
    let out = run(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn forced_exact_at_dim_40_exits_3() {
    let dir = scratch("exact40");
    let out = run(&[
        "params",
        "--basis",
        "lp:1.0:40",
        "--exact",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("capacity"), "{stderr}");
}

#[test]
fn forced_exact_thresholds_above_cap_exits_3() {
    let dir = scratch("exact-thresholds");
    let out = run(&[
        "thresholds",
        "--basis",
        "summing:8",
        "--exact",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn witness_refs_resolve(csv_path: &Path, witnesses_path: &Path, ref_column: usize) {
    let witnesses: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(witnesses_path).unwrap()).unwrap();
    let map = witnesses.as_object().unwrap();
    let csv = std::fs::read_to_string(csv_path).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let witness_ref = fields[ref_column];
        assert!(
            map.contains_key(witness_ref),
            "{witness_ref} from {csv_path:?} missing in sidecar"
        );
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn params_outputs_resolve_witnesses() {
    let dir = scratch("params");
    let out = run(&[
        "params",
        "--basis",
        "summing:5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    witness_refs_resolve(&dir.join("params.csv"), &dir.join("witnesses.json"), 4);
    let csv = std::fs::read_to_string(dir.join("params.csv")).unwrap();
    assert!(csv.starts_with("param_id,m,value,mode,witness_ref\n"));
    assert!(csv.contains("\nsucc,,"));
}

#[test]
fn unit_l1_params_report_unit_unconditionality() {
    let dir = scratch("params-l1");
    let out = run(&[
        "params",
        "--basis",
        "lp:1.0:8",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("params.csv")).unwrap();
    let k_rows: Vec<&str> = csv.lines().filter(|l| l.starts_with("k,")).collect();
    assert_eq!(k_rows.len(), 8);
    for row in k_rows {
        let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(value, 1.0, "{row}");
        assert!(row.contains(",exact,"));
    }
}

#[test]
fn thresholds_outputs_resolve_witnesses() {
    let dir = scratch("thresholds");
    let out = run(&[
        "thresholds",
        "--basis",
        "summing:4",
        "--grid-k",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    witness_refs_resolve(&dir.join("thresholds.csv"), &dir.join("witnesses.json"), 5);
    let csv = std::fs::read_to_string(dir.join("thresholds.csv")).unwrap();
    assert!(csv.contains("lower_bound:exhaustive_grid"));
}

#[test]
fn lebesgue_clips_m_max_with_warning() {
    let dir = scratch("lebesgue");
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{"limits":{"m_max":99}}"#).unwrap();
    let out = run(&[
        "lebesgue",
        "--basis",
        "lp:1.0:4",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("clipping"), "{stderr}");
    witness_refs_resolve(&dir.join("lebesgue.csv"), &dir.join("witnesses.json"), 3);
}

#[test]
fn verify_small_catalog_exits_0() {
    let dir = scratch("verify");
    let out = run(&[
        "verify",
        "--dim",
        "4",
        "--grid-k",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("greedy_dichotomy"));
    assert!(dir.join("verify_report.json").exists());
    // per-basis CSV bundles exist and resolve their witnesses
    let sub = dir.join("summing-4");
    for file in ["params.csv", "thresholds.csv", "lebesgue.csv", "witnesses.json"] {
        assert!(sub.join(file).exists(), "{file} missing");
    }
    witness_refs_resolve(&sub.join("params.csv"), &sub.join("witnesses.json"), 4);
    witness_refs_resolve(&sub.join("thresholds.csv"), &sub.join("witnesses.json"), 5);
}

#[test]
fn verify_includes_custom_basis_files_from_config() {
    let dir = scratch("verify-custom");
    let basis_path = dir.join("tilted.json");
    std::fs::write(
        &basis_path,
        r#"{"space":{"kind":"lp","p":1.0,"dim":3},
           "vectors":[[1.0,0.3,0.0],[0.0,1.0,0.3],[0.0,0.0,1.0]]}"#,
    )
    .unwrap();
    let config = dir.join("config.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"catalog":{{"dim":4,"seed":7,"custom_basis_files":["{}"]}},
                "grid":{{"s":2.0,"K":4,"levels":6}}}}"#,
            basis_path.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("custom:tilted"), "{stdout}");
}

#[test]
fn custom_basis_file_loads() {
    let dir = scratch("custom");
    let path = dir.join("tilted.json");
    std::fs::write(
        &path,
        r#"{"space":{"kind":"lp","p":1.0,"dim":2},
           "vectors":[[1.0,0.5],[0.0,1.0]]}"#,
    )
    .unwrap();
    let out = run(&[
        "params",
        "--basis-file",
        path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.join("params.csv")).unwrap();
    assert!(csv.lines().count() > 3);
}
