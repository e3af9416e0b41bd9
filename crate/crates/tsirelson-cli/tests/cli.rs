//! End-to-end tests of the `tsirelson` binary: golden outputs, the exit-code
//! contract, determinism of machine-readable reports, and round-tripping of
//! spec documents.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value as Json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tsirelson"))
}

/// Absolute path to a fixture in the workspace-level `specs/` directory.
fn spec(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("specs");
    p.push(name);
    assert!(p.exists(), "missing fixture {}", p.display());
    p.display().to_string()
}

/// Scratch file path unique to this test process.
fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("tsirelson-cli-test-{}-{name}", std::process::id()))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "unexpected exit code; stdout:\n{}\nstderr:\n{}",
        stdout_of(out),
        stderr_of(out)
    );
}

// ---------------------------------------------------------------------------
// Golden outputs
// ---------------------------------------------------------------------------

#[test]
fn lambda_csv_for_invlinear_is_all_ones() {
    let out = run(&["lambda", &spec("invlinear.json"), "--max", "3", "--format", "csv"]);
    assert_exit(&out, 0);
    assert_eq!(stdout_of(&out), "n,lambda\n1,1/1\n2,1/1\n3,1/1\n");
}

#[test]
fn lambda_csv_for_weight_one_pairs_counts_support() {
    let out = run(&["lambda", &spec("a2-theta1.json"), "--max", "16", "--format", "csv"]);
    assert_exit(&out, 0);
    let mut expected = String::from("n,lambda\n");
    for n in 1..=16 {
        expected.push_str(&format!("{n},{n}/1\n"));
    }
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn norm_of_map_vector_is_exact() {
    let out = run(&["norm", &spec("a2-theta1.json"), "--vector", r#"{"1":"2/3","4":"-1/3"}"#]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("norm: 1/1"), "got:\n{text}");
    assert!(text.contains("witness:"), "got:\n{text}");
}

#[test]
fn norm_of_segment_shorthand_matches_fundamental_function() {
    let out = run(&["norm", &spec("tsirelson.json"), "--vector", "segment 1..6"]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("norm: 3/2"), "got:\n{}", stdout_of(&out));
}

#[test]
fn norm_reads_vector_from_file() {
    let path = scratch("vector.json");
    std::fs::write(&path, r#"{"1":"1","2":"1"}"#).unwrap();
    let out = run(&[
        "norm",
        &spec("tsirelson.json"),
        "--vector-file",
        &path.display().to_string(),
    ]);
    let _ = std::fs::remove_file(&path);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("norm: 1/1"), "got:\n{}", stdout_of(&out));
}

#[test]
fn classify_schreier_below_one_is_undetermined_with_exit_3() {
    let out = run(&["classify", &spec("tsirelson.json")]);
    assert_exit(&out, 3);
    let text = stdout_of(&out);
    assert!(text.contains("saturation: undetermined"), "got:\n{text}");
    assert!(text.contains("[index-above-cap]"), "got:\n{text}");
}

#[test]
fn classify_saturation_trio_is_exact() {
    let out = run(&["classify", &spec("a3-13-a4-12.json"), "--format", "structured"]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["saturation"]["kind"], "lpSaturated");
    assert_eq!(doc["result"]["saturation"]["p"]["exact"], "2/1");
    assert_eq!(doc["result"]["reflexive"], true);

    let out = run(&["classify", &spec("a2-12-a5-15.json"), "--format", "structured"]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["saturation"]["kind"], "c0Saturated");
    assert_eq!(doc["result"]["reflexive"], false);

    let out = run(&["classify", &spec("a2-35.json"), "--format", "structured"]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["saturation"]["kind"], "lpSaturated");
    assert_eq!(doc["result"]["reflexive"], true);
}

#[test]
fn compare_verdicts_carry_case_tags() {
    let out = run(&[
        "compare",
        &spec("a2-910.json"),
        &spec("a3-910.json"),
        "--format",
        "structured",
    ]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["verdict"], "totallyIncomparable");
    assert_eq!(doc["result"]["case"], "distinct-p");

    let out = run(&[
        "compare",
        &spec("a2-45.json"),
        &spec("a4-1625.json"),
        "--format",
        "structured",
    ]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["verdict"], "notTotallyIncomparable");
    assert_eq!(doc["result"]["case"], "equal-p");

    let out = run(&[
        "compare",
        &spec("a2-12-a5-15.json"),
        &spec("a2-35.json"),
        "--format",
        "structured",
    ]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["verdict"], "totallyIncomparable");
    assert_eq!(doc["result"]["case"], "c0-versus-lp");
}

#[test]
fn compare_outside_exact_rules_is_evidence_only_with_exit_3() {
    let out = run(&["compare", &spec("tsirelson.json"), &spec("schlumprecht.json")]);
    assert_exit(&out, 3);
    assert!(stdout_of(&out).contains("evidence only"), "got:\n{}", stdout_of(&out));
}

#[test]
fn index_of_bounded_cardinality_family() {
    let out = run(&["index", r#"{"kind":"AnK","k":3}"#]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("index: Finite(3)"), "got:\n{}", stdout_of(&out));

    let out = run(&["index", r#"{"kind":"Schreier"}"#, "--cap", "6", "--format", "structured"]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["index"]["kind"], "InfiniteAboveCap");
    assert_eq!(doc["result"]["index"]["value"], 6);
}

#[test]
fn admissible_reports_witness_marks() {
    let out = run(&["admissible", r#"{"kind":"AnK","k":2}"#, "--sets", "[[1],[2,3]]"]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("admissible: yes"), "got:\n{text}");
    assert!(text.contains("marks: {1,2}"), "got:\n{text}");

    let out = run(&["admissible", r#"{"kind":"AnK","k":2}"#, "--sets", "[[1],[2],[3]]"]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("admissible: no"));

    // Schreier: three successive sets starting late enough are admissible.
    let out = run(&["admissible", r#"{"kind":"Schreier"}"#, "--sets", "[[3],[4],[5,6]]"]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("admissible: yes"));
}

#[test]
fn dualball_enumeration_matches_library() {
    let out = run(&[
        "dualball",
        &spec("a2-theta1.json"),
        "--support",
        "3",
        "--depth",
        "2",
        "--format",
        "structured",
    ]);
    assert_exit(&out, 0);
    let doc: Json = serde_json::from_str(&stdout_of(&out)).unwrap();
    let reported = doc["result"]["count"].as_u64().unwrap();

    let space = tsirelson::SpaceSpec::finite_mixed(vec![(
        tsirelson::Family::AtMostK { k: 2 },
        tsirelson::scalar::ratio(1, 1),
    )]);
    let expected = tsirelson::enumerate_k(&space, 3, 2, false, 64, &tsirelson::Budget::default())
        .unwrap()
        .len() as u64;
    assert_eq!(reported, expected);
}

#[test]
fn witness_finds_schlumprecht_pair_scale() {
    let out = run(&[
        "witness",
        &spec("schlumprecht.json"),
        "--blocks",
        "2",
        "--epsilon",
        "1/5",
        "--max-block",
        "1024",
    ]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("witness found: scale 10, block length 1024"), "got:\n{text}");
}

#[test]
fn witness_absent_for_sup_norm_space() {
    let out = run(&[
        "witness",
        &spec("invlinear.json"),
        "--blocks",
        "2",
        "--epsilon",
        "1/2",
        "--max-block",
        "256",
    ]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("no witness"), "got:\n{}", stdout_of(&out));
}

// ---------------------------------------------------------------------------
// Exit-code contract
// ---------------------------------------------------------------------------

#[test]
fn budget_exhaustion_exits_2() {
    let out = run(&[
        "norm",
        &spec("tsirelson.json"),
        "--vector",
        "segment 1..40",
        "--budget",
        "50",
    ]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("budget exceeded"), "got:\n{}", stderr_of(&out));
}

#[test]
fn malformed_documents_exit_1() {
    let cases: &[(&str, &str)] = &[
        ("theta out of range", r#"{"space":{"form":"FiniteMixed","entries":[{"family":{"kind":"AnK","k":2},"theta":"3/2"}]}}"#),
        ("unknown top-level field", r#"{"space":{"form":"AdmissibleSeq","coeffs":{"form":"InvLinear"}},"extra":1}"#),
        ("unknown family kind", r#"{"space":{"form":"FiniteMixed","entries":[{"family":{"kind":"Fancy"},"theta":"1/2"}]}}"#),
        ("unknown entry field", r#"{"space":{"form":"FiniteMixed","entries":[{"family":{"kind":"Schreier"},"theta":"1/2","bonus":1}]}}"#),
        ("float theta", r#"{"space":{"form":"FiniteMixed","entries":[{"family":{"kind":"Schreier"},"theta":0.5}]}}"#),
        ("wrong schema version", r#"{"schemaVersion":2,"space":{"form":"AdmissibleSeq","coeffs":{"form":"InvLinear"}}}"#),
    ];
    for (label, body) in cases {
        let path = scratch(&format!("bad-{}.json", label.replace(' ', "-")));
        std::fs::write(&path, body).unwrap();
        let out = run(&["classify", &path.display().to_string()]);
        let _ = std::fs::remove_file(&path);
        assert_exit(&out, 1);
        assert!(!stderr_of(&out).is_empty(), "case {label:?} should explain itself");
    }
}

#[test]
fn bad_vector_and_bad_flags_exit_1() {
    let out = run(&["norm", &spec("tsirelson.json"), "--vector", "segment 5..2"]);
    assert_exit(&out, 1);

    let out = run(&["norm", &spec("tsirelson.json"), "--vector", r#"{"0":"1"}"#]);
    assert_exit(&out, 1);

    let out = run(&["classify", &spec("a2-35.json"), "--format", "csv"]);
    assert_exit(&out, 1);

    let out = run(&["lambda", &spec("invlinear.json"), "--max", "0"]);
    assert_exit(&out, 1);

    let out = run(&["frobnicate"]);
    assert_exit(&out, 1);
}

#[test]
fn help_and_version_exit_0() {
    let out = run(&["--help"]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("norm"));

    let out = run(&["--version"]);
    assert_exit(&out, 0);
}

// ---------------------------------------------------------------------------
// Determinism and round-trips
// ---------------------------------------------------------------------------

#[test]
fn structured_reports_are_byte_identical_across_runs() {
    let args = ["classify", &spec("a2-35.json"), "--format", "structured"];
    let a = run(&args);
    let b = run(&args);
    assert_exit(&a, 0);
    assert_exit(&b, 0);
    assert_eq!(a.stdout, b.stdout, "structured stdout must be reproducible");

    let out_path = scratch("det.json");
    let args = [
        "compare",
        &spec("a2-910.json"),
        &spec("a3-910.json"),
        "--out",
        &out_path.display().to_string(),
    ];
    let ra = run(&args);
    assert_exit(&ra, 0);
    let ba = std::fs::read(&out_path).unwrap();
    let rb = run(&args);
    assert_exit(&rb, 0);
    let bb = std::fs::read(&out_path).unwrap();
    let _ = std::fs::remove_file(&out_path);
    assert_eq!(ba, bb, "--out reports must be reproducible");
    let doc: Json = serde_json::from_slice(&ba).unwrap();
    assert_eq!(doc["schemaVersion"], 1);
    assert_eq!(doc["command"], "compare");
    assert_eq!(doc["inputs"][0]["role"], "spec-left");
    assert_eq!(doc["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn parallel_lambda_matches_sequential() {
    let base = [
        "lambda",
        &spec("a2-12-a3-23.json"),
        "--max",
        "10",
        "--method",
        "norm",
        "--format",
        "csv",
    ];
    let seq = run(&base);
    let par = run(&[&base[..], &["--jobs", "4"]].concat());
    assert_exit(&seq, 0);
    assert_exit(&par, 0);
    assert_eq!(seq.stdout, par.stdout, "job count must not change the table");
}

#[test]
fn spec_documents_round_trip_through_serialization() {
    let dir = {
        let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
        p.pop();
        p.pop();
        p.push("specs");
        p
    };
    let mut checked = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = tsirelson_cli::specdoc::parse_spec_document(&text)
            .unwrap_or_else(|e| panic!("fixture {} failed: {e:#}", path.display()));
        let emitted = serde_json::json!({
            "schemaVersion": 1,
            "space": serde_json::to_value(&doc.space).unwrap(),
        });
        let reparsed = tsirelson_cli::specdoc::parse_spec_document(&emitted.to_string())
            .unwrap_or_else(|e| panic!("re-parse of {} failed: {e:#}", path.display()));
        assert_eq!(doc.space, reparsed.space, "round-trip changed {}", path.display());
        checked += 1;
    }
    assert!(checked >= 15, "expected the full fixture catalog, found {checked}");
}
