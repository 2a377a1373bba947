use std::process::{Command, Output};

use serde_json::Value;

fn gfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfp")).args(args).output().expect("run gfp")
}

fn csv_records(text: &[u8]) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text);
    let header = r.headers().unwrap().clone();
    (header, r.records().map(Result::unwrap).collect())
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let args = ["sweep", "--model", "mslr", "--criterion", "fp,gfp,chi2", "--q", "2:16:3", "--m", "2,9"];
    let csv_out = gfp(&[&args[..], &["--format", "csv"]].concat());
    let json_out = gfp(&[&args[..], &["--format", "json"]].concat());
    assert!(csv_out.status.success() && json_out.status.success());

    let (header, records) = csv_records(&csv_out.stdout);
    let json: Value = serde_json::from_slice(&json_out.stdout).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(records.len(), 3 * 2 * 3);
    assert_eq!(rows.len(), records.len());

    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for (rec, row) in records.iter().zip(rows) {
        assert_eq!(rec[col("criterion")], row["criterion"].as_str().unwrap().to_string());
        let v: f64 = rec[col("value")].parse().unwrap();
        assert_eq!(v, row["value"].as_f64().unwrap());
        assert_eq!(rec[col("verdict")], row["verdict"].as_str().unwrap().to_string());
    }
    // q-major, then m, then criterion
    assert_eq!(&records[0][col("criterion")], "fp");
    assert_eq!(&records[3][col("m")], "9");

    let text = String::from_utf8(csv_out.stdout).unwrap();
    assert!(text.starts_with("# tool: gfp "));
    assert!(text.contains("# config_hash: "));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("gfp-cli-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(
        &cfg,
        r#"{"model": "slab", "criteria": ["rho_fp", "sq"], "q": [8], "m": "100", "epsilon": 0.5}"#,
    )
    .unwrap();
    let out = gfp(&["criterion", "--config", cfg.to_str().unwrap(), "--m", "7", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["m"] == 7 && r["q"] == 8.0 && r["model"] == "slab"));

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"model": "slab", "colour": 1}"#).unwrap();
    assert_eq!(gfp(&["criterion", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(gfp(&["criterion", "--model", "mslr", "--criterion", "nope"]).status.code(), Some(2));
    assert_eq!(gfp(&["criterion", "--model", "mslr", "--criterion", "fp", "--q", "1.5"]).status.code(), Some(2));
    assert_eq!(gfp(&["criterion", "--model", "no-such-model"]).status.code(), Some(2));
    assert_eq!(gfp(&["reproduce", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(gfp(&["reproduce", "dirac"]).status.code(), Some(0));
    // the dense-clique SQ value stays below 1 at these parameters
    assert_eq!(gfp(&["reproduce", "dense-clique"]).status.code(), Some(1));
    // Dirac violates the correlation assumption
    assert_eq!(gfp(&["check"]).status.code(), Some(1));
}

#[test]
fn scenario_constant_override() {
    let dir = std::env::temp_dir().join(format!("gfp-cli-const-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.json");
    std::fs::write(&cfg, r#"{"constants": {"C": 2.0}}"#).unwrap();
    let out = gfp(&["reproduce", "slab-truncation", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = json["constants"].as_array().unwrap().iter().find(|c| c["name"] == "C").unwrap().clone();
    assert_eq!(c["value"], 2.0);
    assert_eq!(c["source"], "config override");

    std::fs::write(&cfg, r#"{"constants": {"nonsense": 2.0}}"#).unwrap();
    let out = gfp(&["reproduce", "slab-truncation", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
