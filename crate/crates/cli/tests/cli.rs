use std::path::Path;
use std::process::{Command, Output};

use acca_cli::format::{parse_series_csv, parse_snapshots_csv, parse_sweep_csv, SERIES_HEADER, SWEEP_HEADER};

fn acca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acca")).args(args).output().expect("spawn acca")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_series_with_empty_winding_on_a_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = acca(&["run", "--n", "12", "--topology", "path", "--steps", "240", "--epsilon", "0.1", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(tmp.path().join("series.csv")).unwrap();
    assert!(text.starts_with(&format!("{SERIES_HEADER}\n")));
    let recs = parse_series_csv(&text).unwrap();
    assert_eq!(recs.iter().map(|r| r.t).collect::<Vec<_>>(), (0..=20).map(|i| i * 12).collect::<Vec<_>>());
    assert!(recs.iter().all(|r| r.winding.is_none()));
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')));
    assert!(!tmp.path().join("snapshots.csv").exists());
}

#[test]
fn ring_series_carries_integer_winding() {
    let tmp = tempfile::tempdir().unwrap();
    let out = acca(&[
        "run", "--n", "300", "--topology", "ring", "--init", "winding", "--winding", "-3", "--steps", "3000", "--out",
        s(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = parse_series_csv(&std::fs::read_to_string(tmp.path().join("series.csv")).unwrap()).unwrap();
    assert!(recs.iter().all(|r| r.winding == Some(-3)));
    assert!((recs[0].tau1 + 1.0 / 3.0).abs() < 0.02);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    std::fs::write(&cfg, "# test\nn = 10\ntopology = ring\nsteps = 50\nrecord_stride = 5\nsnapshot_times = 0, 50\n").unwrap();
    let out = acca(&["run", "--config", s(&cfg), "--steps", "100", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = parse_series_csv(&std::fs::read_to_string(tmp.path().join("series.csv")).unwrap()).unwrap();
    assert_eq!(recs.len(), 21);
    assert_eq!(recs.last().unwrap().t, 100);
    let snaps = parse_snapshots_csv(&std::fs::read_to_string(tmp.path().join("snapshots.csv")).unwrap()).unwrap();
    assert_eq!(snaps.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0, 50]);
    assert!(snaps.iter().all(|r| r.1.len() == 10));
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.conf");
    std::fs::write(&cfg, "n = 10\ncolour = blue\n").unwrap();
    for args in [
        vec!["run", "--config", s(&cfg)],
        vec!["run", "--n", "10", "--k-mid", "6"],
        vec!["run", "--epsilon", "1.5"],
        vec!["run", "--topology", "torus"],
        vec!["run", "--n", "2", "--topology", "ring"],
        vec!["run", "--topology", "path", "--condition-winding", "1"],
        vec!["sweep", "--k-mids", ""],
        vec!["verify-tau", "--max-w", "0"],
        vec!["frobnicate"],
    ] {
        let out = acca(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn failed_write_removes_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    // a directory where a file should go makes the second write fail
    std::fs::create_dir(tmp.path().join("snapshots.csv")).unwrap();
    let out = acca(&["run", "--n", "10", "--steps", "20", "--snapshot-times", "10", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("series.csv").exists());
}

#[test]
fn sweep_writes_table_sidecar_and_heatmaps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = acca(&[
        "sweep", "--n", "12", "--topologies", "path,ring", "--epsilons", "0.01", "--k-mids", "1,7", "--k-noises",
        "0,3", "--steps", "600", "--replicates", "1", "--out", s(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert!(text.starts_with(&format!("{SWEEP_HEADER}\n")));
    let rows = parse_sweep_csv(&text).unwrap();
    // k_mid = 7 exceeds the largest matching on 12 sites
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.k_mid == 1 && r.replicates == 1 && r.se_r.is_none()));
    let errors = std::fs::read_to_string(tmp.path().join("sweep.errors")).unwrap();
    assert_eq!(errors.lines().count(), 4);
    assert!(errors.lines().all(|l| l.contains(",7,")));
    for m in ["R", "absY", "absTau1"] {
        let svg = std::fs::read_to_string(tmp.path().join(format!("heatmap_{m}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn render_reproduces_heatmaps_from_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = acca(&["run", "--n", "16", "--steps", "64", "--snapshot-times", "0,16,32,48,64", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(0));
    let svg = tmp.path().join("st.svg");
    let out = acca(&["render", s(&tmp.path().join("snapshots.csv")), "--out", s(&svg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains(r#"viewBox="0 0 16 5""#));

    let bad = tmp.path().join("series.csv");
    assert_eq!(acca(&["render", s(&bad)]).status.code(), Some(1));
    assert_eq!(acca(&["render", s(&tmp.path().join("missing.csv"))]).status.code(), Some(1));
}

#[test]
fn verify_tau_prints_every_winding() {
    let out = acca(&["verify-tau", "--max-w", "3", "--samples", "20000", "--suite", "false", "--threads", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let ws: Vec<i64> = text.lines().skip(1).filter_map(|l| l.split_whitespace().next()?.parse().ok()).collect();
    assert_eq!(ws, vec![-3, -2, -1, 1, 2, 3]);
    assert_eq!(text.matches("PASS").count(), 6);
}
