use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shifted-manin")).args(args).output().expect("binary runs")
}

fn path(name: &str) -> String {
    corpus(name).display().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn double_of_e1_matches_the_golden_file() {
    let o = run(&["double", &path("e1.json")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let golden = std::fs::read_to_string(corpus("e1_double.json")).unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden);
    assert!(String::from_utf8_lossy(&o.stderr).contains("verdict: pass"));
}

#[test]
fn double_writes_to_a_file_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = run(&["double", &path("e1.json"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: pass"));
    let o = run(&["check", out.to_str().unwrap(), "--suite", "triple"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    // a double of the double's underlying algebra with zero cobracket still builds
    let o = run(&["double", out.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn corrupted_pairing_fails_with_a_witness() {
    let o = run(&["check", &path("e1_double_bad_kappa.json"), "--suite", "metric"]);
    assert_eq!(code(&o), 1);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("[FAIL] antisymmetry") && s.contains("κ(f, ε^f) = 1 but κ(ε^f, f) = 1"), "{s}");
}

#[test]
fn broken_jacobi_fails() {
    let o = run(&["check", &path("sl2_bad_jacobi.json"), "--suite", "lie", "--json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let jac = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "jacobi").unwrap();
    assert_eq!(jac["status"], "fail");
    let o = run(&["check", &path("sl2.json"), "--suite", "lie"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{\"schema\": \"shifted-manin/algebra/v1\", \"basis\": [".to_string()),
        ("schema.json", "{\"schema\": \"other\", \"basis\": []}".to_string()),
        ("label.json", std::fs::read_to_string(corpus("e1.json")).unwrap().replace("\"a\": \"e\"", "\"a\": \"zz\"")),
        ("rational.json", std::fs::read_to_string(corpus("e1.json")).unwrap().replace("\"1\"", "\"1/0\"")),
    ];
    for (name, text) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        let o = run(&["check", p.to_str().unwrap(), "--suite", "lie"]);
        assert_eq!(code(&o), 2, "{name}");
        assert!(!o.stderr.is_empty(), "{name}");
    }
    let o = run(&["check", &path("missing.json"), "--suite", "lie"]);
    assert_eq!(code(&o), 2);
    let o = run(&["check", &path("e1.json"), "--suite", "nonsense"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn diagnostics_point_at_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("label.json");
    let text = std::fs::read_to_string(corpus("e1.json")).unwrap().replace("\"b\": \"f\"", "\"b\": \"q\"");
    std::fs::write(&p, text).unwrap();
    let o = run(&["check", p.to_str().unwrap(), "--suite", "lie"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("brackets[0].b") && err.contains("\"q\""), "{err}");
}

#[test]
fn quantize_passes_and_small_word_bound_overflows() {
    let o = run(&["quantize", &path("e1_double.json"), "--pretty"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["timing_ms"].is_u64());
    let o = run(&["quantize", &path("e1_double.json"), "-L", "2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--word-len"));
}

#[test]
fn koszul_runs_on_the_e1_double() {
    let o = run(&["koszul", &path("e1_double.json"), "-S", "3", "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("[PASS] d_squared"));
}

#[test]
fn yangian_flagship_run() {
    let o = run(&[
        "yangian",
        "--g",
        &path("sl2.json"),
        "--N",
        "3",
        "--level",
        "1",
        "--modules",
        &path("ev2.json"),
        &path("ev2.json"),
        "--vars",
        "z",
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["vars"], "z");
    assert!(v["checks"].as_array().unwrap().len() > 30);
}

#[test]
fn yangian_rejects_a_bad_variable_count() {
    let o = run(&[
        "yangian",
        "--g",
        &path("sl2.json"),
        "--N",
        "2",
        "--modules",
        &path("ev2.json"),
        &path("ev2.json"),
        "--vars",
        "z,w",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn yangian_level_needs_a_skew_tail() {
    let lin = path("linear_tail.json");
    let o = run(&["yangian", "--g", &path("sl2.json"), "--N", "2", "--level", "1", "--rmatrix", &lin]);
    assert_eq!(code(&o), 2);
    let o = run(&["yangian", "--g", &path("sl2.json"), "--N", "2", "--rmatrix", &lin]);
    assert_eq!(code(&o), 1);
    let o = run(&[
        "yangian",
        "--g",
        &path("sl2.json"),
        "--N",
        "2",
        "--level",
        "-1/2",
        "--rmatrix",
        &path("skew_constant_tail.json"),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn yangian_abelian_base() {
    let o = run(&["yangian", "--g", &path("gl1.json"), "--N", "2", "--level", "1", "--rmatrix", &path("yang.json")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn eps_doubled_evaluation_module_is_dg_only_at_level_zero() {
    let m = path("ev2_eps.json");
    let o = run(&["yangian", "--g", &path("sl2.json"), "--N", "2", "--modules", &m, &m, "--vars", "z"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(&["yangian", "--g", &path("sl2.json"), "--N", "2", "--level", "1", "--modules", &m]);
    assert_eq!(code(&o), 1);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("[FAIL] module ev2[ε]/[d_M, ρ(a)] = ρ(d a)"), "{text}");
    assert!(text.contains("entry (2, 1) differs by 1"), "{text}");
}
