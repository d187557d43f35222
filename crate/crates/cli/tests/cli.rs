//! End-to-end tests of the command-line tool.

use std::path::PathBuf;
use std::process::{Command, Output};

use skelmad_core::bench::read_csv;

fn skelmad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelmad")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn golden_run_reports_twenty_four_betas() {
    let o = skelmad(&["run", "--machine", "smad", &data("family_3.lambda")]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "beta"), "24");
    let final_code = value(&out, "final");
    let t = skelmad_core::term::parse::parse_syntax(final_code).unwrap();
    assert!(t.alpha_eq(&skelmad_core::term::parse::parse_syntax("\\w. w").unwrap()));
}

#[test]
fn identity_is_already_final() {
    let o = skelmad(&["run", "--machine", "smad", &data("id.lambda")]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "beta"), "0");
    assert_eq!(value(&out, "final"), "λw.w");
}

#[test]
fn plain_machine_on_the_third_family_member() {
    let o = skelmad(&["run", "--machine", "mad", &data("family_3_pure.lambda")]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "beta"), "63");
    let o = skelmad(&["run", "--machine", "mad", "--family", "3", "--audit"]);
    assert_eq!(value(&stdout(&o), "beta"), "63");
}

#[test]
fn trace_has_one_line_per_transition() {
    let o = skelmad(&["run", "--machine", "smad", "--trace", &data("family_3.lambda")]);
    let out = stdout(&o);
    let transitions: usize = value(&out, "transitions").parse().unwrap();
    let states = out.lines().filter(|l| l.contains(" | ")).count();
    assert_eq!(states, transitions + 1);
    assert_eq!(out.lines().filter(|l| l.starts_with("→β")).count(), 24);
}

#[test]
fn csv_statistics() {
    let o = skelmad(&["run", "--machine", "smad", "--csv", "--family", "2"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("machine,outcome,beta,"));
    assert!(lines.next().unwrap().starts_with("smad,final,16,"));
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let open = dir.path().join("open.lambda");
    std::fs::write(&open, "\\x. y").unwrap();
    let o = skelmad(&["run", "--machine", "mad", open.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("free variable y"));
    let bad = dir.path().join("bad.lambda");
    std::fs::write(&bad, "(\\x. x").unwrap();
    let o = skelmad(&["run", "--machine", "mad", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
    let o = skelmad(&["run", "--machine", "mad", "--fuel", "10", "--family", "3"]);
    assert!(!o.status.success());
    assert_eq!(value(&stdout(&o), "outcome"), "out-of-fuel");
}

#[test]
fn reduce_counts_multiplicative_steps() {
    let o = skelmad(&["reduce", "--strategy", "skneed", &data("family_3_pure.lambda")]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "dB"), "22");
    let o = skelmad(&["reduce", "--strategy", "need", "--trace", &data("family_3_pure.lambda")]);
    let out = stdout(&o);
    assert_eq!(value(&out, "dB"), "63");
    assert_eq!(out.lines().filter(|l| l.starts_with("→dB")).count(), 63);
}

#[test]
fn reduce_reports_stuck_open_terms() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("open.lambda");
    std::fs::write(&f, "(\\x. x y) (\\z. z)").unwrap();
    let o = skelmad(&["reduce", "--strategy", "need", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "outcome"), "stuck on y");
}

#[test]
fn skel_separates_closed_subterms() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("v.lambda");
    std::fs::write(&f, "\\x. \\y. x (\\z. z y) (\\w. w)").unwrap();
    let out = stdout(&skelmad(&["skel", f.to_str().unwrap()]));
    assert_eq!(value(&out, "skeleton"), "λx.λy.x (λz.z y) p_1");
    assert_eq!(value(&out, "flesh"), "p_1\\λw.w");
    assert_eq!(value(&out, "white_size"), "9");
    assert_eq!(value(&out, "marking_steps"), "9");
}

#[test]
fn bench_writes_one_row_per_size_and_machine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let o = skelmad(&[
        "bench",
        "--family",
        "0..4",
        "--machines",
        "mad,smad",
        "--calculus",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(
        text.starts_with("n,machine,beta,sk,ss,sea1,sea2,sea3,finalEnvLen,maxStateSize,inkSpaceCalculus,wallNanos\n")
    );
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 10);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.n, i / 2);
        assert_eq!(r.machine, if i % 2 == 0 { "mad" } else { "smad" });
        assert_eq!(r.ink_space_calculus, Some(r.max_state_size));
    }
    assert_eq!(rows[0].beta, 4);
    assert_eq!(rows[1].beta, 4);
}

#[test]
fn bench_rows_are_reproducible() {
    let strip = |o: Output| -> Vec<String> {
        stdout(&o).lines().map(|l| l.rsplit_once(',').map_or(l, |(a, _)| a).to_string()).collect()
    };
    let a = strip(skelmad(&["bench", "--family", "0..6"]));
    let b = strip(skelmad(&["bench", "--family", "0..6"]));
    assert_eq!(a.len(), 15);
    assert_eq!(a, b);
}

#[test]
fn bench_refuses_large_plain_runs() {
    let o = skelmad(&["bench", "--family", "20..21", "--machines", "mad"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));
}

#[test]
fn check_reports_each_suite() {
    let o = skelmad(&["check", "--suite", "skeleton", "--cases", "1000"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS skeleton: 1000 cases, 0 skipped, 0 failures"));
    let o = skelmad(&["check", "--suite", "bisim,marking", "--cases", "50", "--max-size", "15", "--seed", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("PASS bisim: 50 cases") && out.contains("PASS marking"));
    let o = skelmad(&["check", "--suite", "nope"]);
    assert!(!o.status.success());
}
