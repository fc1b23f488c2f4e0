use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantor-oneway"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_identity_on_zeros() {
    let o = cli(&["eval", "--fn", "bitselect:identity", "--input", "zeros", "--bits", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0000 use=4\n");
}

#[test]
fn eval_double_reads_even_positions() {
    let o = cli(&["eval", "--fn", "bitselect:double", "--input", "periodic:10", "--bits", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1111 use=7\n");
}

#[test]
fn measure_of_a_full_cover() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.txt");
    std::fs::write(&path, "00\n01\n1\n").unwrap();
    let o = cli(&["measure", "--prefixset", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/1\n");
    let o = cli(&["measure", "--prefixset", path.to_str().unwrap(), "--sigma", "0"]);
    assert_eq!(stdout(&o), "1/2\n");
}

#[test]
fn demos_pass() {
    for name in ["prop-simple", "thm-surjection", "thm-two1"] {
        let o = cli(&["demo", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert_eq!(stdout(&o).lines().last(), Some("PASS"), "{name}");
    }
}

#[test]
fn runs_are_byte_identical() {
    let args = ["extract", "--mode", "randomized", "--fn", "surj:collatz(32,2000)", "--n", "0..8"];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn extract_prints_one_verdict_per_element() {
    let o = cli(&["extract", "--mode", "simple", "--fn", "simple:collatz(32,2000)", "--n", "0..6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 6);
    for (n, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 4, "{line}");
        assert_eq!(fields[0], format!("n={n}"));
        assert!(fields[1] == "member=true" || fields[1] == "member=false", "{line}");
        assert!(fields[2].strip_prefix("use=").unwrap().parse::<u64>().is_ok());
        assert!(fields[3].strip_prefix("stagebound=").unwrap().parse::<u64>().is_ok());
    }
}

#[test]
fn two_to_one_extraction_runs() {
    let o = cli(&["extract", "--mode", "two1", "--fn", "two1:collatz(32,2000)", "--n", "5", "--zeta", "0110"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("n=5 member="));
}

#[test]
fn fiber_counts_doubled_words() {
    let o = cli(&["fiber", "--fn", "bitselect:double", "--target", "10", "--depth", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "branches=4 surviving=4 undetermined=0\n");
}

#[test]
fn invert_tree_recovers_identity() {
    let o = cli(&["invert-tree", "--fn", "bitselect:identity", "--target", "periodic:01", "--bits", "6", "--depth", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "010101\n");
}

#[test]
fn malformed_arguments_exit_1() {
    for args in [
        &["eval", "--fn", "nope:1", "--input", "zeros", "--bits", "1"][..],
        &["frobnicate"][..],
        &["measure", "--prefixset", "/nonexistent/file"][..],
        &["extract", "--mode", "simple", "--fn", "surj:collatz(8,100)", "--n", "0"][..],
    ] {
        let o = cli(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn failed_computations_exit_2_with_one_line() {
    let o = cli(&["invert-tree", "--fn", "bitselect:double", "--target", "ones", "--bits", "4", "--depth", "8"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "));

    let o = cli(&["extract", "--mode", "simple", "--fn", "simple:collatz(32,2000)", "--inverter", "flip:1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
}
