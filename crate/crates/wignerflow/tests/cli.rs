//! End-to-end tests of the command-line binary: the documented usage
//! examples, artifact schemas, configuration round-trips, determinism, and
//! the exit-status contract (0 success, 1 numerical failure, 2 usage).

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wignerflow"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wignerflow-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(path: &PathBuf) -> String {
    std::fs::read_to_string(path).expect("artifact readable")
}

#[test]
fn sweep_example_writes_47_rows_with_rate_columns() {
    let dir = temp_dir("sweep47");
    let out_path = dir.join("sweep.csv");
    let out = run(&[
        "sweep",
        "--n",
        "0",
        "--alpha",
        "1.5",
        "--eps",
        "0.25:6:47",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);

    let text = read(&out_path);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "epsilon,sigma_rate,entropy_rate,purity_rate,clamp_events"
    );
    assert_eq!(lines.len(), 1 + 47, "header plus 47 rows");
    let first: Vec<f64> = lines[1]
        .split(',')
        .map(|c| c.parse().expect("numeric cell"))
        .collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0], 0.25);
    let last: Vec<f64> = lines[47].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(last[0], 6.0);
    for line in &lines[1..] {
        for cell in line.split(',').take(4) {
            assert!(
                cell.parse::<f64>().unwrap().is_finite(),
                "finite rates in {line}"
            );
        }
    }
}

#[test]
fn grid_example_riemann_sum_is_unit() {
    let dir = temp_dir("grid-riemann");
    let out_path = dir.join("grid.csv");
    let out = run(&[
        "grid",
        "--n",
        "1",
        "--alpha",
        "2.5",
        "--field",
        "W",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);

    let text = read(&out_path);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,k,value"));
    let mut xs = std::collections::BTreeSet::new();
    let mut ks = std::collections::BTreeSet::new();
    let mut sum = 0.0;
    let mut rows = 0usize;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        xs.insert(cols[0].to_bits());
        ks.insert(cols[1].to_bits());
        sum += cols[2];
        rows += 1;
    }
    assert_eq!(rows, 201 * 201, "default grid is 201x201");
    assert_eq!(xs.len(), 201);
    assert_eq!(ks.len(), 201);
    let axis = |set: &std::collections::BTreeSet<u64>| -> Vec<f64> {
        let mut v: Vec<f64> = set.iter().map(|b| f64::from_bits(*b)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let (xv, kv) = (axis(&xs), axis(&ks));
    let riemann = sum * (xv[1] - xv[0]) * (kv[1] - kv[0]);
    assert!(
        (riemann - 1.0).abs() <= 1e-4,
        "post-hoc Riemann sum {riemann} should be 1 within 1e-4"
    );
}

#[test]
fn dump_config_round_trip_reproduces_artifact() {
    let dir = temp_dir("roundtrip");
    let a = dir.join("a.csv");
    let flags = [
        "sweep",
        "--n",
        "1",
        "--alpha",
        "2.5",
        "--eps",
        "0.5:4:9",
        "--samples",
        "512",
        "--theta",
        "0.7",
    ];

    let out = run(&[&flags[..], &["--out", a.to_str().unwrap()]].concat());
    assert_code(&out, 0);

    let dump = run(&[&flags[..], &["--dump-config"]].concat());
    assert_code(&dump, 0);
    let doc: serde_json::Value =
        serde_json::from_slice(&dump.stdout).expect("dump-config emits JSON");
    assert_eq!(doc["command"], "sweep");
    assert_eq!(doc["system"]["n"], 1);
    assert_eq!(doc["epsilon_range"]["steps"], 9);

    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, &dump.stdout).unwrap();
    let b = dir.join("b.csv");
    let out = run(&[
        "sweep",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "config round-trip must reproduce the artifact byte-for-byte"
    );

    // Same resolved configuration → byte-identical artifact, independent of
    // the worker-thread cap.
    let c = dir.join("c.csv");
    let out = run(&[
        &flags[..],
        &["--out", c.to_str().unwrap(), "--threads", "1"],
    ]
    .concat());
    assert_code(&out, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = temp_dir("usage");
    // Non-semi-integer alpha.
    let out = run(&["grid", "--alpha", "1.7"]);
    assert_code(&out, 2);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("semi-integer"),
        "diagnostic names the constraint"
    );
    // Sweep without a range.
    assert_code(&run(&["sweep", "--n", "0"]), 2);
    // Flux with a range instead of a single energy.
    assert_code(&run(&["flux", "--eps", "0.25:6:47"]), 2);
    // Unknown field label / format / subcommand / flag; empty invocation.
    assert_code(&run(&["grid", "--field", "Q"]), 2);
    assert_code(&run(&["grid", "--format", "yaml"]), 2);
    assert_code(&run(&["frobnicate"]), 2);
    assert_code(&run(&["grid", "--frobnicate"]), 2);
    assert_code(&run(&[]), 2);
    // Config file for a different command.
    let cfg = dir.join("sweep.json");
    std::fs::write(&cfg, br#"{"command":"sweep"}"#).unwrap();
    assert_code(&run(&["flux", "--config", cfg.to_str().unwrap()]), 2);
    // Unknown key in a config file is rejected loudly.
    let bad = dir.join("bad.json");
    std::fs::write(&bad, br#"{"samples":512,"sample_count":9}"#).unwrap();
    assert_code(&run(&["validate", "--config", bad.to_str().unwrap()]), 2);
}

#[test]
fn numerical_failure_exits_1_with_coordinates() {
    let out = run(&["flux", "--n", "0", "--alpha", "1.5", "--eps", "1e300"]);
    assert_code(&out, 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("(x = "),
        "diagnostic carries the offending coordinates: {err}"
    );
}

#[test]
fn trajectory_currents_stagnation_artifacts() {
    let dir = temp_dir("artifacts");

    let t = dir.join("t.dat");
    let out = run(&[
        "trajectory",
        "--eps",
        "3",
        "--samples",
        "64",
        "--format",
        "dat",
        "--out",
        t.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = read(&t);
    assert_eq!(text.lines().next(), Some("# tau x k dxdtau"));
    assert_eq!(text.lines().count(), 1 + 64);

    let c = dir.join("c.csv");
    let out = run(&[
        "currents",
        "--grid",
        "0.8:2:11,-1:1:9",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = read(&c);
    assert_eq!(text.lines().next(), Some("x,k,jx,jk"));
    assert_eq!(text.lines().count(), 1 + 11 * 9);

    let s = dir.join("s.json");
    let out = run(&[
        "stagnation",
        "--n",
        "0",
        "--alpha",
        "1.5",
        "--grid",
        "0.5:3:41,-2:2:41",
        "--format",
        "json",
        "--out",
        s.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let doc: serde_json::Value = serde_json::from_str(&read(&s)).unwrap();
    let points = doc["inventory"]["points"].as_array().unwrap();
    assert!(
        !points.is_empty(),
        "ground state has a vortex in this window"
    );
    for p in points {
        let w = p["winding"].as_i64().unwrap();
        assert!((-1..=1).contains(&w), "winding {w} outside -1..=1");
    }
}

#[test]
fn validate_quick_prints_table_and_exit_matches_report() {
    let dir = temp_dir("validate");
    let report_path = dir.join("report.json");
    let out = run(&[
        "validate",
        "--quick",
        "--out",
        report_path.to_str().unwrap(),
    ]);

    let stdout = String::from_utf8_lossy(&out.stdout);
    let check_lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("check ")).collect();
    assert_eq!(check_lines.len(), 12, "one table line per check:\n{stdout}");
    for line in &check_lines {
        assert!(
            line.contains(" PASS ") || line.contains(" FAIL "),
            "verdict on line: {line}"
        );
    }
    assert!(
        stdout.lines().any(|l| l.starts_with("validate:")),
        "summary line present"
    );

    let report: serde_json::Value = serde_json::from_str(&read(&report_path)).unwrap();
    assert_eq!(report["total"], 12);
    assert_eq!(report["quick"], true);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 12);
    let passed = checks
        .iter()
        .filter(|c| c["passed"].as_bool().unwrap())
        .count();
    assert_eq!(report["passed"], passed);

    // The exit status must agree with the report: 0 iff every check passed.
    let expected = if passed == 12 { 0 } else { 1 };
    assert_code(&out, expected);
}
