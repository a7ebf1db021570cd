//! End-to-end checks of the command-line interface: golden outputs, CSV
//! schemas, grid parsing, determinism, and exit codes.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polar-mlc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn write_fig1_code(dir: &tempfile::TempDir) -> std::path::PathBuf {
    let path = dir.path().join("fig1.code");
    std::fs::write(&path, "n=3\nA=6,7,8\n").unwrap();
    path
}

#[test]
fn tc_prints_twelve_for_the_example_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fig1_code(&dir);
    let out = stdout(&run(&["tc", "--code", path.to_str().unwrap(), "--list-size", "4"]));
    assert_eq!(out.lines().next(), Some("12"));
    // Breakdown follows: header plus the five visited nodes.
    assert_eq!(out.lines().nth(1), Some("depth,index,kind,cost"));
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn tc_quiet_prints_total_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fig1_code(&dir);
    let out = stdout(&run(&["--quiet", "tc", "--code", path.to_str().unwrap(), "--list-size", "4"]));
    assert_eq!(out, "12\n");
}

#[test]
fn tc_list_size_falls_back_to_code_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("with_l.code");
    std::fs::write(&path, "n=3\nL=4\nA=6,7,8\n").unwrap();
    let out = stdout(&run(&["--quiet", "tc", "--code", path.to_str().unwrap()]));
    assert_eq!(out, "12\n");
}

#[test]
fn construct_roundtrips_through_tc() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constructed.code");
    let out = run(&[
        "--output",
        path.to_str().unwrap(),
        "construct",
        "--n",
        "6",
        "--k",
        "32",
        "--design-snr-db",
        "2.0",
        "--list-size",
        "8",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n=6\nL=8\nA="));
    let tc = stdout(&run(&["--quiet", "tc", "--code", path.to_str().unwrap()]));
    let total: u64 = tc.trim().parse().unwrap();
    assert!(total >= 6);
}

#[test]
fn tc_sweep_emits_nineteen_rows() {
    let out = stdout(&run(&[
        "tc-sweep",
        "--n",
        "6",
        "--list-size",
        "8",
        "--rates",
        "0.05:0.95:0.05",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "rate,K,tc");
    assert_eq!(lines.len(), 20);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 3);
    }
}

#[test]
fn mlc_rates_schema_and_chain_rule() {
    let out = stdout(&run(&["mlc-rates", "--m", "2", "--snr-db", "10"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "snr_db,rate_1,rate_2,total_mi");
    assert_eq!(lines.len(), 2);
    let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 10.0);
    assert!((fields[1] + fields[2] - fields[3]).abs() < 1e-6);
}

#[test]
fn mlc_tc_schema_and_sum_identity() {
    let out = stdout(&run(&[
        "mlc-tc",
        "--m",
        "3",
        "--n",
        "5",
        "--list-size",
        "4",
        "--epsilon",
        "0.01",
        "--snr-db",
        "8:12:2",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "snr_db,tc_1,tc_2,tc_3,tc_total");
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        let fields: Vec<u64> = line.split(',').skip(1).map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0] + fields[1] + fields[2], fields[3]);
    }
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.code");
    let out = run(&[
        "--output",
        path.to_str().unwrap(),
        "construct",
        "--n",
        "5",
        "--k",
        "16",
        "--design-snr-db",
        "1.0",
    ]);
    assert!(out.status.success());
    let args = [
        "simulate",
        "--code",
        path.to_str().unwrap(),
        "--list-size",
        "2",
        "--snr-db",
        "1:3:1",
        "--frames",
        "300",
        "--seed",
        "7",
    ];
    let first = stdout(&run(&args));
    let second = stdout(&run(&args));
    assert_eq!(first, second);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "snr_db,frames,bit_errors,frame_errors,ber,fer");
    assert_eq!(lines.len(), 4);
}

#[test]
fn simulate_mlc_emits_per_level_columns() {
    let out = stdout(&run(&[
        "simulate-mlc",
        "--m",
        "2",
        "--n",
        "4",
        "--list-size",
        "2",
        "--snr-db",
        "12",
        "--frames",
        "50",
        "--seed",
        "3",
        "--genie",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "snr_db,frames,bit_errors,frame_errors,ber,fer,ber_1,ber_2,fer_1,fer_2"
    );
    assert_eq!(lines.len(), 2);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["tc"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_and_validation_failures_exit_one() {
    let out = run(&["tc", "--code", "/nonexistent/path.code", "--list-size", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("polar-mlc:"));

    let out = run(&["construct", "--n", "4", "--k", "99", "--design-snr-db", "0"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&[
        "tc-sweep",
        "--n",
        "4",
        "--list-size",
        "2",
        "--rates",
        "0.9:0.1:0.1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grid_accepts_single_values_and_lists() {
    let out = stdout(&run(&["mlc-rates", "--m", "1", "--snr-db", "0,5,10"]));
    assert_eq!(out.lines().count(), 4);
}
