use std::process::{Command, Output};

use polyspline::report::SWEEP_COLUMNS;
use polyspline::RunReport;

fn polyspline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyspline")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

#[test]
fn exit_codes_follow_verdicts() {
    let ok = polyspline(&["cube-test", "--field", "2", "--dim", "3", "--poly", "x1*x2 + x3", "--m", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(report(&ok).pass);

    let bad = polyspline(&["cube-test", "--field", "2", "--dim", "3", "--poly", "x1*x2*x3", "--m", "3"]);
    assert_eq!(bad.status.code(), Some(2));
    let r = report(&bad);
    assert!(!r.pass);
    assert!(r.results["example_bad_cube"].as_str().unwrap().starts_with("(("));

    let input = polyspline(&["cube-test", "--field", "6", "--dim", "2", "--poly", "x1", "--m", "1"]);
    assert_eq!(input.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&input.stderr).contains("not prime"));

    assert_eq!(polyspline(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(polyspline(&["--help"]).status.code(), Some(0));
}

#[test]
fn sampling_needs_a_seed() {
    let out = polyspline(&["correct", "--field", "3", "--dim", "2", "--poly", "x1", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn report_round_trips_and_timing_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args =
        ["gowers", "--field", "3", "--dim", "2", "--poly", "x1*x2", "--m", "2", "--report", path.to_str().unwrap()];
    let out = polyspline(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let r: RunReport = serde_json::from_str(&text).unwrap();
    assert!(r.wall_clock_ms.is_some());
    assert_eq!(r.artifact, concat!("polyspline ", env!("CARGO_PKG_VERSION")));
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", text);

    let quiet = polyspline(&["gowers", "--field", "3", "--dim", "2", "--poly", "x1*x2", "--m", "2", "--no-timing"]);
    assert!(!String::from_utf8_lossy(&quiet.stdout).contains("wall_clock_ms"));
    assert_eq!(report(&quiet).results["gowers"]["mode"]["kind"], "exact");
}

#[test]
fn csc_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("cube.txt");
    std::fs::write(&sys, "v1\nv1 + v2\nv1 + v3\nv1 + v2 + v3\n").unwrap();
    let out = polyspline(&["csc", "--system", sys.to_str().unwrap(), "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).verdicts[0].summary, "complexity 2 \u{2264} m=2: pass");
    let tight = polyspline(&["csc", "--system", sys.to_str().unwrap(), "--m", "1"]);
    assert_eq!(tight.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_csv_row_per_rate() {
    let out = polyspline(&[
        "sweep",
        "--field",
        "3",
        "--dim",
        "3",
        "--poly",
        "x1 + x2 + 1",
        "--m",
        "2",
        "--rho",
        "0,0.02,0.05,0.1,0.2",
        "--votes",
        "50",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_COLUMNS);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(&rows[0][0], "0.0");
    assert_eq!(&rows[0][4], "true");

    let empty = polyspline(&[
        "sweep", "--field", "3", "--dim", "2", "--poly", "x1", "--m", "2", "--seed", "1", "--format", "csv",
    ]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap(), format!("{}\n", SWEEP_COLUMNS.join(",")));

    let not_sweep =
        polyspline(&["gowers", "--field", "3", "--dim", "2", "--poly", "x1", "--m", "2", "--format", "csv"]);
    assert_eq!(not_sweep.status.code(), Some(1));
}

#[test]
fn corrected_table_feeds_back_into_cube_test() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("h.table");
    let t = table.to_str().unwrap();
    let out = polyspline(&[
        "correct",
        "--field",
        "3",
        "--dim",
        "3",
        "--poly",
        "x1 + 2*x2",
        "--noise",
        "0.05",
        "--m",
        "2",
        "--seed",
        "4",
        "--out",
        t,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let check = polyspline(&["cube-test", "--fun", t, "--m", "2"]);
    assert_eq!(check.status.code(), Some(0));
    let mismatch = polyspline(&["cube-test", "--fun", t, "--field", "2", "--m", "2"]);
    assert_eq!(mismatch.status.code(), Some(1));
}

#[test]
fn variety_file_and_inline_equations_agree() {
    let dir = tempfile::tempdir().unwrap();
    let var = dir.path().join("q.var");
    std::fs::write(&var, "# hyperbolic quadric\nx1*x2 + x3*x4 = 0\n").unwrap();
    let a = polyspline(&[
        "uniformity",
        "--field",
        "3",
        "--dim",
        "4",
        "--variety",
        var.to_str().unwrap(),
        "--m",
        "2",
        "--no-timing",
    ]);
    let b = polyspline(&[
        "uniformity",
        "--field",
        "3",
        "--dim",
        "4",
        "--eq",
        "x1*x2 + x3*x4 = 0",
        "--m",
        "2",
        "--no-timing",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(report(&a).results, report(&b).results);
    assert_eq!(report(&a).results["space"]["x_size"], 33);
}
