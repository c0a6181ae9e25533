use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use incidence_core::verifier::{CensusReport, ClassificationReport, ExampleReport, LemmaVerdict, PartialCensus};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incidence")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Copies the fixtures into a scratch directory so outputs can sit beside them.
fn scratch() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    dir
}

#[test]
fn census_reports_thirty_six() {
    let o = run(&["--json", "census", "--poset", "chain:2", "--field", "Fp", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: CensusReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.oracle_count, r.theorem_count, r.set_equal), (36, 36, Some(true)));
    assert!(r.passed());
}

#[test]
fn census_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let ck = ck.to_str().unwrap();
    let args = ["census", "--poset", "chain:2", "--field", "Fp", "2", "--checkpoint", ck, "--step", "200"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let state: PartialCensus = serde_json::from_str(&std::fs::read_to_string(ck).unwrap()).unwrap();
    assert!(state.is_complete());
    assert_eq!(state.records.len(), 16);

    let mut partial = state.clone();
    partial.next = 200;
    partial.records.retain(|r| r.index < 200);
    std::fs::write(ck, serde_json::to_string(&partial).unwrap()).unwrap();
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let resumed: PartialCensus = serde_json::from_str(&std::fs::read_to_string(ck).unwrap()).unwrap();
    assert_eq!(resumed, state);
}

#[test]
fn census_over_gate_names_the_size() {
    let o = run(&["census", "--poset", "chain:3", "--field", "Fp", "3"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("census"), "{}", stderr(&o));
    assert!(stderr(&o).contains(&3u128.pow(36).to_string()), "{}", stderr(&o));
}

#[test]
fn examples_match_golden_json() {
    for id in ["z2-nonseparating", "diagonal-truncation", "z2-not-jordan"] {
        let o = run(&["--json", "examples", id]);
        assert_eq!(o.status.code(), Some(0), "{id}: {}", stderr(&o));
        let golden = std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{id}.json")),
        )
        .unwrap();
        assert_eq!(stdout(&o), golden, "{id} drifted from its golden file");
        let reports: Vec<ExampleReport> = serde_json::from_str(&golden).unwrap();
        assert!(reports[0].pass);
    }
}

#[test]
fn z2_not_jordan_quotes_a_failing_pair() {
    let o = run(&["examples", "z2-not-jordan"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("e[2]"), "{}", stdout(&o));
    assert!(run(&["examples", "nope"]).status.code() != Some(0));
}

#[test]
fn build_then_classify_round_trip() {
    let dir = scratch();
    let o = run(&["build", "--spec", dir.path().join("chain3_spec.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let map = dir.path().join("built.txt");
    std::fs::write(&map, stdout(&o)).unwrap();

    let o = run(&["--json", "classify", "--map", map.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: ClassificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.passed());
    assert!(r.verdicts.unital && r.verdicts.preserver == Some(true));

    let o = run(&["check", "--map", map.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn classify_refutes_with_a_lemma_name() {
    let o = run(&["--json", "classify", "--map", fixture("not_preserver.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r: ClassificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.verdicts.preserver, Some(false));
    assert_eq!(r.refutation.unwrap().lemma, "from-vf-to-lb");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let o = run(&["classify", "--map", fixture("short.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.txt");
    std::fs::write(&spec, "spec\nlambda: 1->{1} 2->{2}\npsi:\n1 1 0\n").unwrap();
    let o = run(&["build", "--poset", "chain:2", "--field", "Fp", "3", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("psi must annihilate delta"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--poset", "chain:2"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--poset", "chain:2", "--field", "Fp", "4"]).status.code(), Some(2));
}

#[test]
fn lemma_suite_and_criteria_pass() {
    let o = run(&["--json", "lemmas", "--poset", "chain:2", "--field", "Fp", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["pass"], true);
    let v: Vec<LemmaVerdict> = serde_json::from_value(report["verdicts"].clone()).unwrap();
    assert_eq!(v.len(), 288);
    assert!(v.iter().all(|v| v.pass));

    let o = run(&["lemmas", "--poset", "diamond", "--field", "Q", "--seed", "9", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = run(&["lemmas", "--inverse", "--poset", "chain:2", "--field", "Fp", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = run(&["criteria", "--poset", "chain:2", "--field", "Fp", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn out_flag_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["--json", "--out", out.to_str().unwrap(), "examples", "diagonal-truncation"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<ExampleReport> = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(reports[0].pass);
}
