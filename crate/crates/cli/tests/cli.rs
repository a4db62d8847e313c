use std::fs;
use std::process::{Command, Output};

use wqed_cli::output::{Fig9Row, SpectrumRow};

fn wqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wqed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn decoupled_spectrum_transmits_fully() {
    let out = wqed(&["spectrum", "--G", "0", "--k-count", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["k", "E", "T", "R", "Re_s", "Im_s", "uA2", "uB2"]);
    let t: Vec<f64> = reader
        .deserialize::<SpectrumRow>()
        .map(|r| r.unwrap().transmission)
        .collect();
    assert_eq!(t, [1.0, 1.0]);
}

#[test]
fn fig9_levels_lie_outside_band() {
    let out = wqed(&["figure", "fig9"]);
    assert!(out.status.success());
    let rows: Vec<Fig9Row> = csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .map(Result::unwrap)
        .collect();
    assert_eq!(rows.len(), 61);
    assert!(rows.iter().all(|r| r.e_b1 > 17.0 && r.e_b2 < 13.0));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let csv_path = dir.path().join("s.csv");
    let common = ["spectrum", "--k-count", "17", "--omega", "3", "--Omega", "2"];
    let out = wqed(&[&common[..], &["--format", "json", "--out", json.to_str().unwrap()]].concat());
    assert!(out.status.success(), "{}", stderr(&out));
    let out = wqed(&[&common[..], &["--out", csv_path.to_str().unwrap()]].concat());
    assert!(out.status.success());

    let from_json: Vec<SpectrumRow> = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let from_csv: Vec<SpectrumRow> = csv::Reader::from_path(&csv_path)
        .unwrap()
        .deserialize()
        .map(Result::unwrap)
        .collect();
    assert_eq!(from_json.len(), 17);
    assert_eq!(from_json, from_csv);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# b-line\nomega = 5\nOmega = 8\nG = 1\nk-count = 3\n").unwrap();
    let out = wqed(&["spectrum", "--config", cfg.to_str().unwrap(), "--G", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Vec<SpectrumRow> = csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .map(Result::unwrap)
        .collect();
    assert_eq!(rows.len(), 3);
    assert!((rows[1].transmission - 36.0 / 117.0).abs() < 1e-12);
}

#[test]
fn zeta_file_sets_collective_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let zeta = dir.path().join("zeta.txt");
    fs::write(&zeta, "1 0\n0 1\n0.6 0.8\n-1 0\n").unwrap();
    let args = ["spectrum", "--k-count", "3", "--xi", "1.5"];
    let a = wqed(&[&args[..], &["--zeta-file", zeta.to_str().unwrap()]].concat());
    let b = wqed(&[&args[..], &["--n-atoms", "4"]].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validation_failures_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "omega = 5\nOmega 8\n").unwrap();
    let out = wqed(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.cfg:2:"), "{}", stderr(&out));

    for args in [
        &["spectrum", "--k-count", "1"][..],
        &["spectrum", "--k-max", "4"],
        &["spectrum", "--g", "-1"],
        &["spectrum", "--G", "-1"],
        &["spectrum", "--G", "1", "--n-atoms", "3", "--xi", "1"],
        &["spectrum", "--format", "xml"],
        &["spectrum", "--convention", "sideways"],
        &["figure", "fig42"],
        &["nonsense"],
        &["wavepacket", "--j0", "-50"],
    ] {
        let out = wqed(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn minus_convention_reports_mirrored_wavenumbers() {
    let plus = wqed(&["spectrum", "--k-count", "5"]);
    let minus = wqed(&["spectrum", "--k-count", "5", "--convention", "minus"]);
    let read = |o: &Output| -> Vec<SpectrumRow> {
        csv::Reader::from_reader(o.stdout.as_slice())
            .deserialize()
            .map(Result::unwrap)
            .collect()
    };
    let (p, m) = (read(&plus), read(&minus));
    // Same k grid, so the minus rows are the plus rows at pi - k.
    for (a, b) in p.iter().zip(m.iter().rev()) {
        assert!((a.transmission - b.transmission).abs() < 1e-12);
        assert!((a.energy - b.energy).abs() < 1e-12);
    }
}

#[test]
fn bound_command_lists_two_levels() {
    let out = wqed(&["bound", "--omega", "15", "--Omega", "5", "--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["branch"], "upper");
    assert!((rows[0]["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn wavepacket_command_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let snaps = dir.path().join("snap.csv");
    let out = wqed(&[
        "wavepacket", "--omega", "0", "--G", "0", "--sigma", "10", "--j0", "-150", "--half-width", "500",
        "--t-final", "60", "--j-cut", "5", "--snapshot-every", "1000", "--snapshot-out",
        snaps.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&snaps).unwrap();
    assert!(text.starts_with("t,j,prob\n"));
    let records = text.lines().count() - 1;
    assert!(records >= 2 * 1001 && records.is_multiple_of(1001), "{records}");
}
