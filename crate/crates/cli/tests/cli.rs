//! Command-line behaviour: exit codes, outputs and configuration.

use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use toric_cli::config::{parse_kv, Overrides, RunConfig};
use toric_cli::io::{join_coords, split_coords};

fn toric(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric"))
        .args(args)
        .arg("--output-dir")
        .arg(dir.join("out"))
        .arg("--cache-dir")
        .arg(dir.join("cache"))
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let no_flags = Command::new(env!("CARGO_BIN_EXE_toric")).arg("frobnicate").output().unwrap();
    assert_eq!(no_flags.status.code(), Some(1));
    // 12 is not a product of an odd number of primes
    assert_eq!(toric(&["classes", "--disc", "12"], dir.path()).status.code(), Some(2));
    assert_eq!(toric(&["classes", "--disc", "11", "--bound", "abc"], dir.path()).status.code(), Some(1));
    assert_eq!(
        toric(&["figures", "--disc", "23", "--bound", "2000", "--kind", "scatter-1d"], dir.path()).status.code(),
        Some(2)
    );
    let ok = toric(&["verify", "--disc", "11", "--bound", "500"], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn classes_summary_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = toric(&["classes", "--disc", "13", "--level", "5"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mass"], "6");
    assert_eq!(v["type_number"], 3);
    assert_eq!(v["goldfeld_bound"], "5/32");
    assert!(dir.path().join("out/classes_d13_l5.json").exists());
    assert!(dir.path().join("cache/classes_d13_l5_v1.json").exists());
}

#[test]
fn periods_csv_round_trips_through_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["periods", "--disc", "11", "--bound", "3000"];
    assert!(toric(&args, dir.path()).status.success());
    let csv = dir.path().join("out/periods_d11_l1_b3000.csv");
    let first = std::fs::read(&csv).unwrap();
    let parsed = toric_cli::io::parse_periods_csv(&csv, &first).unwrap();
    assert!(!parsed.is_empty());
    assert!(parsed.iter().all(|r| r.delta < 0 && r.delta > -3000));
    // warm cache, same bytes
    assert!(toric(&args, dir.path()).status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), first);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    std::fs::write(&file, "# sample\ndisc = 23\nbound = 5000\nx = 1000,2000\noutput-dir = elsewhere\n").unwrap();
    let o = Overrides { bound: Some(8000), ..Default::default() };
    let cfg = RunConfig::resolve(Some(&file), &o).unwrap();
    assert_eq!((cfg.disc_d, cfg.bound), (23, 8000));
    assert_eq!(cfg.cutoffs().unwrap(), vec![1000, 2000]);
    assert_eq!(cfg.output_dir, Path::new("elsewhere"));
    assert!(parse_kv("disc 23").is_err());
}

proptest! {
    #[test]
    fn coordinates_round_trip(v in prop::collection::vec(-1_000_000i64..1_000_000, 1..6)) {
        prop_assert_eq!(split_coords::<i64>(&join_coords(&v)).unwrap(), v);
    }
}
