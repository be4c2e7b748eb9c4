use std::path::PathBuf;
use std::process::{Command, Output};

use ridc::harness::{RunRecord, HEADER};

fn ridc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridc"))
        .args(args)
        .env_remove("RIDC_NUM_THREADS")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ridc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn records(text: &str) -> Vec<RunRecord> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| RunRecord::parse_line(l).expect("well-formed row"))
        .collect()
}

#[test]
fn solve_decay_prints_error() {
    let out = ridc(&["solve", "decay", "--order", "4", "--steps", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(HEADER));
    let rows = records(&stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].problem, "decay");
    assert!(rows[0].error_inf > 0.0 && rows[0].error_inf < 1e-8);
    assert!(String::from_utf8(out.stderr).unwrap().contains("error_inf"));
}

#[test]
fn solve_rejects_bad_configuration() {
    let out = ridc(&["solve", "decay", "--order", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("order 0"));

    let out = ridc(&["solve", "lorenz"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    for name in ["decay", "stiff", "brusselator", "polynomial"] {
        assert!(err.contains(name), "{err}");
    }

    let out = ridc(&["solve", "decay", "--mode", "rk4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ridc(&["solve", "decay", "--order", "4", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_brusselator_writes_files() {
    let csv = scratch("bruss.csv");
    let state = scratch("bruss_state.csv");
    let out = ridc(&[
        "solve",
        "brusselator",
        "--order",
        "3",
        "--steps",
        "200",
        "--mode",
        "be",
        "-o",
        csv.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let rows = records(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(
        (rows[0].order, rows[0].nt, rows[0].mode.as_str()),
        (3, 200, "be")
    );
    assert!(rows[0].walltime_s > 0.0);
    let state = std::fs::read_to_string(&state).unwrap();
    assert_eq!(state.lines().count(), 401);
}

#[test]
fn serial_and_pipelined_rows_agree_bitwise() {
    let run = |exec: &str| {
        let out = ridc(&[
            "solve",
            "stiff",
            "--mode",
            "be",
            "--order",
            "5",
            "--steps",
            "77",
            "--executor",
            exec,
        ]);
        assert_eq!(out.status.code(), Some(0));
        records(&String::from_utf8(out.stdout).unwrap()).remove(0)
    };
    let a = run("serial");
    let b = run("pipelined");
    let c = run("serial");
    assert_eq!(a.error_inf.to_bits(), b.error_inf.to_bits());
    assert_eq!(a.error_inf.to_bits(), c.error_inf.to_bits());
}

#[test]
fn converge_writes_series_and_summary() {
    let csv = scratch("conv.csv");
    let out = ridc(&[
        "converge",
        "decay",
        "--orders",
        "1,4",
        "--steps",
        "25,50,100,200,400",
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stderr).unwrap();
    assert_eq!(summary.lines().filter(|l| l.contains("slope")).count(), 2);
    let rows = records(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(rows.len(), 10);
    assert!(rows[..5].windows(2).all(|w| w[0].nt < w[1].nt));
}

#[test]
fn converge_needs_three_points() {
    let out = ridc(&["converge", "decay", "--steps", "50,100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn converge_floor_reported() {
    let out = ridc(&[
        "converge",
        "polynomial",
        "--orders",
        "3",
        "--steps",
        "10,20,40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("floor reached"));
}

#[test]
fn bench_emits_rows() {
    let out = ridc(&[
        "bench",
        "decay",
        "--orders",
        "1,2",
        "--steps",
        "50",
        "--repeats",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = records(&String::from_utf8(out.stdout).unwrap());
    let execs: Vec<&str> = rows.iter().map(|r| r.executor.as_str()).collect();
    assert_eq!(
        execs,
        ["euler", "serial", "pipelined", "serial", "pipelined"]
    );
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("efficiency"));

    let out = ridc(&["bench", "decay", "--repeats", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
