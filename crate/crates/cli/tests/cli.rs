//! End-to-end tests against the compiled binary.

use std::process::{Command, Output, Stdio};
use std::time::Duration;

use triadic_collatz::triadic::TriadicRational;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_triadic-collatz")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("TRIADIC_COLLATZ_OUTPUT")
        .env_remove("TRIADIC_COLLATZ_PARALLELISM")
        .output()
        .expect("spawn binary")
}

fn stdout_lines(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .expect("utf8")
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn orbit_seven_csv() {
    let out = run(&["orbit", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_lines(&out);
    assert_eq!(
        rows[0].join(","),
        "alpha,a,q,c_num,c_denom_exp,c_decimal(display-only)"
    );
    assert_eq!(rows.len(), 13, "header plus 12 orbit rows");
    assert_eq!(rows[1][..2], ["0".to_string(), "7".to_string()]);
    let last = rows.last().unwrap();
    assert_eq!(last[1], "1");
    // every emitted triadic rational parses back to an equal value
    for row in &rows[1..] {
        let c: TriadicRational = format!("{}/3^{}", row[3], row[4]).parse().expect("parse c");
        assert_eq!(c.numerator().to_string(), row[3]);
        assert_eq!(c.denom_exp().to_string(), row[4]);
        assert!(c.in_unit_band());
    }
}

#[test]
fn orbit_seven_json_mirrors_csv() {
    let out = run(&["orbit", "7", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json");
    let rows = doc.as_array().expect("array");
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0]["alpha"], 0);
    assert_eq!(rows[0]["a"], "7");
    assert_eq!(rows[0]["q"], 1);
    assert_eq!(rows[0]["c_num"], "7");
    assert_eq!(rows[0]["c_denom_exp"], 1);
    assert!(rows[0].get("c_decimal(display-only)").is_some());
    assert_eq!(rows[11]["a"], "1");
}

#[test]
fn prefix_count_matches_enumeration() {
    let out = run(&["prefix-count", "7", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_lines(&out);
    assert_eq!(
        rows[0].join(","),
        "a0,psi,p,hits,count,total_steps,reached_one,window_mismatches"
    );
    assert_eq!(
        rows[1],
        ["7", "2", "0", "0;3;5;8;10", "5", "12", "true", "0"]
    );
}

#[test]
fn approx_records_default_table() {
    let out = run(&["approx-records"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_lines(&out);
    assert_eq!(rows[0].join(","), "k,n,frac_lo,frac_hi");
    let ks: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ks, ["1", "3", "5", "17", "29", "41"]);
    let ns: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(ns, ["2", "5", "8", "27", "46", "65"]);
    for row in &rows[1..] {
        let lo: f64 = row[2].parse().expect("frac_lo");
        let hi: f64 = row[3].parse().expect("frac_hi");
        assert!(0.0 < lo && lo <= hi && hi < 1.0);
    }
}

#[test]
fn approx_steer_first_pairs() {
    let out = run(&["approx-steer", "2", "--count", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_lines(&out);
    assert_eq!(rows[0].join(","), "psi,p,case,k,n,lhs,mid,rhs");
    assert_eq!(rows[1], ["2", "0", "HIGH", "1", "1", "20", "27", "28"]);

    let out = run(&["approx-steer", "5", "--count", "1"]);
    let rows = stdout_lines(&out);
    assert_eq!(rows[1], ["5", "1", "LOW", "3", "4", "224", "243", "256"]);
}

#[test]
fn verify_is_byte_identical_across_reruns() {
    let first = run(&["verify", "--trials", "1000", "--rng-seed", "42"]);
    let second = run(&["verify", "--trials", "1000", "--rng-seed", "42"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout);
    let rows = stdout_lines(&first);
    assert_eq!(rows[0].join(","), "property,trials,violations,status");
    assert_eq!(rows.len(), 6, "header plus five property rows");
    for row in &rows[1..] {
        assert_eq!(row[2], "0");
        assert_eq!(row[3], "pass");
    }

    let j1 = run(&["verify", "--trials", "100", "--rng-seed", "7", "--format", "json"]);
    let j2 = run(&["verify", "--trials", "100", "--rng-seed", "7", "--format", "json"]);
    assert_eq!(j1.stdout, j2.stdout);
}

#[test]
fn coverage_is_parallelism_independent() {
    let base = run(&["coverage", "2", "5000", "--bin-count", "50", "--parallelism", "1"]);
    assert_eq!(base.status.code(), Some(0));
    for degree in ["4", "8"] {
        let par = run(&["coverage", "2", "5000", "--bin-count", "50", "--parallelism", degree]);
        assert_eq!(par.stdout, base.stdout, "parallelism {degree}");
    }
    // env override is read, flag wins over env
    let env_run = Command::new(bin())
        .args(["coverage", "2", "5000", "--bin-count", "50"])
        .env("TRIADIC_COLLATZ_PARALLELISM", "3")
        .env_remove("TRIADIC_COLLATZ_OUTPUT")
        .output()
        .expect("spawn");
    assert_eq!(env_run.stdout, base.stdout);
    let flag_beats_env = Command::new(bin())
        .args(["coverage", "2", "5000", "--bin-count", "50", "--parallelism", "2"])
        .env("TRIADIC_COLLATZ_PARALLELISM", "7")
        .env_remove("TRIADIC_COLLATZ_OUTPUT")
        .output()
        .expect("spawn");
    assert_eq!(flag_beats_env.stdout, base.stdout);
    // a malformed env value is rejected even when the flag is present
    let bad_env = Command::new(bin())
        .args(["coverage", "2", "10", "--parallelism", "2"])
        .env("TRIADIC_COLLATZ_PARALLELISM", "0")
        .env_remove("TRIADIC_COLLATZ_OUTPUT")
        .output()
        .expect("spawn");
    assert_eq!(bad_env.status.code(), Some(2));

    let json1 = run(&["coverage", "2", "5000", "--bin-count", "50", "--parallelism", "1", "--format", "json"]);
    let json8 = run(&["coverage", "2", "5000", "--bin-count", "50", "--parallelism", "8", "--format", "json"]);
    assert_eq!(json1.stdout, json8.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&json1.stdout).expect("json");
    assert_eq!(doc[0]["seeds"], 4999);
    assert_eq!(doc[0]["min_c"], "1/3^0");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["approx-steer", "1"][..],
        &["orbit"][..],
        &["orbit", "7", "--bogus"][..],
        &["coverage", "9", "3"][..],
        &["orbit", "0"][..],
        &["orbit", "x"][..],
        &["no-such-command"][..],
        &["coverage", "2", "10", "--parallelism", "0"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?}");
    }
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("triadic-collatz-cli-test-{}.csv", std::process::id()));
    let to_file = run(&["orbit", "27", "--output", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let written = std::fs::read(&path).expect("read output file");
    let to_stdout = run(&["orbit", "27"]);
    assert_eq!(written, to_stdout.stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn interrupt_truncates_csv_with_sentinel() {
    let child = Command::new(bin())
        .args(["coverage", "2", "200000000", "--parallelism", "2"])
        .env_remove("TRIADIC_COLLATZ_OUTPUT")
        .env_remove("TRIADIC_COLLATZ_PARALLELISM")
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn");
    std::thread::sleep(Duration::from_millis(600));
    unsafe {
        libc::kill(child.id() as libc::pid_t, libc::SIGINT);
    }
    let out = child.wait_with_output().expect("wait");
    assert_eq!(out.status.code(), Some(130));
    let text = String::from_utf8(out.stdout).expect("utf8");
    assert!(text.starts_with("bin_count,"), "{text:?}");
    assert!(text.ends_with("# interrupted\n"), "{text:?}");
}
