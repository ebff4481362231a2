use std::process::{Command, Output};

fn palsqf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_palsqf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_three_digit_range() {
    let o = palsqf(&["count", "--base", "10", "--max-x", "1000"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "108");
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(palsqf(&["bogus"]).status.code(), Some(2));
}

#[test]
fn bad_modulus_is_usage_error() {
    let o = palsqf(&["equidist", "--xs", "1e6", "--moduli", "11"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_check_is_usage_error() {
    assert_eq!(palsqf(&["verify", "nosuch"]).status.code(), Some(2));
}

#[test]
fn verify_small_checks() {
    let o = palsqf(&["verify", "salie", "--qmax", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("salie"));

    let o = palsqf(&["--out", "json", "verify", "vdc", "--trials", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["id"], "vdc");
    assert_eq!(v["rows"][0]["passed"], true);
}

#[test]
fn equidist_csv_layout_and_thread_independence() {
    let run = |threads: &str| {
        let o = palsqf(&[
            "--threads", threads, "--out", "csv", "equidist", "--xs", "1e6", "--moduli", "7,13",
        ]);
        assert!(o.status.success());
        stdout(&o)
    };
    let one = run("1");
    let mut lines = one.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next(), Some("x,q,a,count,main_term,abs_err,rel_err,sigma_hat"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1000000");
    assert_eq!(first[1], "7");
    assert_eq!(one.lines().count(), 2 + 6 + 12);
    assert_eq!(one, run("4"));
}

#[test]
fn unwritable_output_is_io_error() {
    let o = palsqf(&["equidist", "--xs", "1e6", "--moduli", "7", "--output", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_baseline_file_is_io_error() {
    let o = palsqf(&["--baseline", "/nonexistent/b.json", "verify", "bs"]);
    assert_eq!(o.status.code(), Some(3));
}
