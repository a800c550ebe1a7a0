use std::process::{Command, Output};

fn telex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses a CSV table with a header into rows of fields.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    (
        header,
        lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect(),
    )
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn exit_prob_at_lower_endpoint() {
    let o = telex(&[
        "exit-prob",
        "--a",
        "0",
        "--b",
        "1",
        "--x",
        "0",
        "--c",
        "1",
        "--lambda",
        "1",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x,u0,u1,u\n0,0.5,0,0.25\n");
}

#[test]
fn exit_prob_at_upper_endpoint() {
    let o = telex(&["exit-prob", "--x", "1", "--c", "2", "--lambda", "3"]);
    let (_, r) = rows(&stdout(&o));
    assert_eq!(num(&r[0][1]), 1.0);
    assert!((num(&r[0][2]) - 3.0 / 5.0).abs() < 1e-15);
}

#[test]
fn drift_quartet_and_direction_filter() {
    let o = telex(&[
        "exit-prob",
        "--x",
        "0",
        "--c0",
        "2",
        "--c1",
        "1",
        "--lambda0",
        "1",
        "--lambda1",
        "1",
    ]);
    let (_, r) = rows(&stdout(&o));
    assert!((num(&r[0][3]) - 0.3588).abs() < 1e-4);
    let o = telex(&[
        "exit-prob",
        "--x",
        "0",
        "--c0",
        "2",
        "--c1",
        "1",
        "--lambda0",
        "1",
        "--lambda1",
        "1",
        "--dir",
        "0",
    ]);
    let (h, r) = rows(&stdout(&o));
    assert_eq!(h, ["x", "u0"]);
    assert!((num(&r[0][1]) - 0.7176).abs() < 1e-4);
}

#[test]
fn exit_time_grid() {
    let o = telex(&["exit-time", "--grid", "5", "--c", "1", "--lambda", "1"]);
    let (h, r) = rows(&stdout(&o));
    assert_eq!(h, ["x", "h0", "h1", "h"]);
    assert_eq!(r.len(), 5);
    assert_eq!(num(&r[2][3]), 0.75);
    assert_eq!(num(&r[4][1]), 0.0);
}

#[test]
fn symmetric_quartet_mean_time_uses_driftless_law() {
    let o = telex(&[
        "exit-time",
        "--x",
        "0.5",
        "--c0",
        "1",
        "--c1",
        "1",
        "--lambda0",
        "1",
        "--lambda1",
        "1",
    ]);
    assert!(o.status.success());
    let (_, r) = rows(&stdout(&o));
    assert_eq!(num(&r[0][3]), 0.75);
}

#[test]
fn strip_prob_time_density() {
    let common = ["--L", "1", "--lambda", "10", "--c", "5", "--y", "0.5"];
    let o = telex(&[&["strip", "prob"][..], &common].concat());
    assert_eq!(stdout(&o), "p0,p1,p2,p3,p\n0.5,0.25,0.5,0.75,0.5\n");
    let o = telex(&[&["strip", "time"][..], &common].concat());
    let (_, r) = rows(&stdout(&o));
    assert!((num(&r[0][4]) - 0.35).abs() < 1e-15);
    let o = telex(&[&["strip", "density", "--dir", "3", "--n", "3"][..], &common].concat());
    let (h, r) = rows(&stdout(&o));
    assert_eq!(h, ["z", "value", "status"]);
    assert_eq!(r.len(), 4);
    assert_eq!(r[3][0], "nan");
    assert_eq!(r[3][2], "singular_mass");
    assert!((num(&r[3][1]) - (-1f64).exp()).abs() < 1e-15);
    let o = telex(&[&["strip", "density", "--dir", "1", "--n", "3"][..], &common].concat());
    assert_eq!(rows(&stdout(&o)).1.len(), 3);
}

#[test]
fn csv_round_trips() {
    let o = telex(&[
        "exit-prob",
        "--grid",
        "7",
        "--c",
        "0.3",
        "--lambda",
        "1.7",
        "--a",
        "-1.1",
        "--b",
        "2.3",
    ]);
    let text = stdout(&o);
    let (_, r) = rows(&text);
    for row in &r {
        for cell in row {
            let v = num(cell);
            assert_eq!(telex_core::format::g17(v), *cell);
        }
    }
}

#[test]
fn json_format() {
    let o = telex(&[
        "strip", "prob", "--L", "1", "--lambda", "10", "--c", "5", "--y", "0.25", "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["p"], 0.625);
}

#[test]
fn exit_statuses() {
    assert_eq!(telex(&["exit-prob", "--c", "1"]).status.code(), Some(1));
    assert_eq!(
        telex(&[
            "exit-prob",
            "--x",
            "0",
            "--c",
            "1",
            "--lambda",
            "1",
            "--c0",
            "2"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        telex(&["exit-prob", "--x", "2", "--c", "1", "--lambda", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        telex(&["exit-prob", "--x", "0.5", "--c", "-1", "--lambda", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        telex(&["strip", "prob", "--L", "1", "--lambda", "10", "--c", "5", "--y", "2"])
            .status
            .code(),
        Some(2)
    );
    let budget = [
        "strip", "density", "--dir", "0", "--L", "1", "--lambda", "10", "--c", "5", "--y", "0.5",
        "--n", "2", "--budget", "50",
    ];
    assert_eq!(telex(&budget).status.code(), Some(3));
    let io = telex(&[
        "exit-prob",
        "--x",
        "0",
        "--c",
        "1",
        "--lambda",
        "1",
        "--out",
        "/nonexistent/dir/f.csv",
    ]);
    assert_eq!(io.status.code(), Some(4));
    assert_eq!(telex(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_matches_closed_forms() {
    let o = telex(&[
        "simulate",
        "--model",
        "telegraph",
        "--c",
        "2",
        "--lambda",
        "4",
        "--x",
        "0.5",
        "--paths",
        "200000",
        "--seed",
        "5",
    ]);
    let (h, r) = rows(&stdout(&o));
    assert_eq!(
        h,
        [
            "statistic",
            "estimate",
            "std_error",
            "closed_form",
            "z_score",
            "paths",
            "seed",
            "status"
        ]
    );
    assert_eq!(r.len(), 3);
    for row in &r {
        assert!(num(&row[4]).abs() < 4.0, "{row:?}");
    }
    let o = telex(&[
        "simulate",
        "--model",
        "planar-strip",
        "--c",
        "5",
        "--lambda",
        "10",
        "--L",
        "1",
        "--y",
        "0.5",
        "--dir",
        "3",
        "--paths",
        "100000",
        "--statistic",
        "no-switch",
    ]);
    let (_, r) = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert!(num(&r[0][4]).abs() < 4.0);
    assert!(
        telex(&[
            "simulate",
            "--model",
            "planar-strip",
            "--c",
            "5",
            "--lambda",
            "10",
            "--L",
            "1",
            "--y",
            "0.5",
            "--statistic",
            "upper-exit"
        ])
        .status
        .code()
            == Some(1)
    );
}

#[test]
fn simulate_is_reproducible_and_exports_paths() {
    let dir = tempfile::tempdir().unwrap();
    let paths = dir.path().join("paths.csv");
    let args = [
        "simulate",
        "--model",
        "telegraph-drift",
        "--c0",
        "2",
        "--c1",
        "1",
        "--lambda0",
        "1",
        "--lambda1",
        "1",
        "--x",
        "0",
        "--paths",
        "3000",
        "--seed",
        "99",
        "--emit-paths",
        paths.to_str().unwrap(),
    ];
    let a = telex(&args);
    let b = telex(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = std::fs::read_to_string(&paths).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path,side,exit_z,time,switches"));
    assert_eq!(lines.count(), 3000);
    let other = telex(&[&args[..16], &["100"]].concat());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn interval_figures_write_files() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["1", "2", "3"] {
        let out = dir.path().join(id);
        let o = telex(&[
            "figure",
            "--id",
            id,
            "--out",
            out.to_str().unwrap(),
            "--n",
            "11",
        ]);
        assert!(o.status.success());
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("metadata.json")).unwrap())
                .unwrap();
        let files = meta["files"].as_array().unwrap();
        assert!(!files.is_empty());
        for f in files {
            let text = std::fs::read_to_string(out.join(f.as_str().unwrap())).unwrap();
            assert_eq!(text.lines().count(), 12);
        }
    }
    let lambda4 = std::fs::read_to_string(dir.path().join("1/exit_prob_lambda4.csv")).unwrap();
    let (_, r) = rows(&lambda4);
    // u(x) - x = (1/2 - x)/(1 + c) with c = 2
    for row in &r {
        let (x, u) = (num(&row[0]), num(&row[3]));
        assert!((u - x - (0.5 - x) / 3.0).abs() < 1e-12);
    }
}

#[test]
fn figure_needs_output_directory() {
    assert_eq!(telex(&["figure", "--id", "1"]).status.code(), Some(1));
    assert_eq!(
        telex(&["figure", "--id", "6", "--out", "/tmp"])
            .status
            .code(),
        Some(1)
    );
}
