use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handelman"))
        .args(args)
        .env_remove("HANDELMAN_LOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Certifies a fixture into `dir`, asserting success.
fn certify_into(dir: &TempDir, name: &str, extra: &[&str]) -> (PathBuf, Output) {
    let out = dir.path().join(name.replace(".json", ".cert.json"));
    let input = fixture(name);
    let mut args = vec!["certify", path_str(&input), "--output", path_str(&out)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    (out, o)
}

#[test]
fn square_certifies_with_expected_bounds() {
    let dir = TempDir::new().unwrap();
    let (cert, o) = certify_into(&dir, "square.json", &[]);
    let text = stdout(&o);
    assert!(text.contains("c-vector: (1/4, 1/4, 1/4, 1/4)"), "{text}");
    assert!(text.contains("B = [[2, -2, 0, 0], [0, 0, 2, -2]]"), "{text}");
    assert!(text.contains("C: 87/2"), "{text}");
    assert!(text.contains("Theorem N: 167"), "{text}");
    assert!(text.contains("used N: 13"), "{text}");

    let v = run(&["verify", path_str(&cert), path_str(&fixture("square.json"))]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
    assert!(stdout(&v).starts_with("pass"));

    let sos = dir.path().join("square.sos.json");
    let s = run(&["schmudgen", path_str(&cert), "--input", path_str(&fixture("square.json"))]);
    assert_eq!(code(&s), 0, "{}", stderr(&s));
    assert!(sos.exists());
    let buckets: usize = stdout(&s)
        .lines()
        .find_map(|l| l.strip_prefix("buckets: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1..=16).contains(&buckets));
}

#[test]
fn output_is_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let input = fixture("interval.json");
    let one = run(&["--threads", "1", "certify", path_str(&input), "-o", path_str(&a)]);
    let many = run(&["--threads", "4", "certify", path_str(&input), "-o", path_str(&b)]);
    assert_eq!(code(&one), 0);
    assert_eq!(code(&many), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // The reported paths differ; everything else matches.
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("certificate:")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&one), strip(&many));
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = TempDir::new().unwrap();
    let (cert, _) = certify_into(&dir, "interval.json", &[]);
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let entry = &mut json["terms"][0]["matrix"][0][0];
    let bumped = format!("{}1", entry.as_str().unwrap());
    *entry = serde_json::Value::String(bumped);
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    let o = run(&["verify", path_str(&tampered), path_str(&fixture("interval.json"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("expansion differs from F at entry (0, 0)"), "{}", stderr(&o));
}

#[test]
fn verification_against_another_matrix_fails() {
    let dir = TempDir::new().unwrap();
    let (cert, _) = certify_into(&dir, "interval.json", &[]);
    let o = run(&["verify", path_str(&cert), path_str(&fixture("interval_other.json"))]);
    assert_eq!(code(&o), 1);
    let o = run(&["verify", path_str(&cert), path_str(&fixture("square.json"))]);
    assert_eq!(code(&o), 1);
}

#[test]
fn simplex_input_certifies_and_verifies() {
    let dir = TempDir::new().unwrap();
    let (cert, _) = certify_into(&dir, "interval_simplex.json", &[]);
    let o = run(&["verify", path_str(&cert), path_str(&fixture("interval_simplex.json"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn constant_input_gives_one_bucket() {
    let dir = TempDir::new().unwrap();
    let (cert, _) = certify_into(&dir, "constant.json", &[]);
    let o = run(&["schmudgen", path_str(&cert)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("buckets: 1\n"));
}

#[test]
fn inspect_prints_normalization_data() {
    let o = run(&["inspect", path_str(&fixture("square.json"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("relations: {y1 + y2 - 1/2, y3 + y4 - 1/2}"));
    assert!(stdout(&o).contains("c: 17\n"));

    let o = run(&["inspect", path_str(&fixture("interval.json"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("B = [[1, 0]]"));
    assert!(stdout(&o).contains("relations: {y1 + y2 - 1}"));

    let o = run(&["inspect", path_str(&fixture("interval_simplex.json"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("L0 = 1 - x1\nL1 = x1\n"), "{}", stdout(&o));
}

#[test]
fn bad_input_exits_2() {
    let o = run(&["certify", path_str(&fixture("malformed.json"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("syntax error at line 3"), "{}", stderr(&o));

    let o = run(&["certify", path_str(&fixture("missing.json"))]);
    assert_eq!(code(&o), 2);

    let o = run(&["certify", path_str(&fixture("interval.json")), "--resolution", "0"]);
    assert_eq!(code(&o), 2);

    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.cert.json");
    fs::write(&empty, "").unwrap();
    let o = run(&["schmudgen", path_str(&empty)]);
    assert_eq!(code(&o), 2);
    let o = run(&["verify", path_str(&empty), path_str(&fixture("interval.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_polytopes_exit_3() {
    let o = run(&["certify", path_str(&fixture("unbounded.json"))]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("unbounded"));
    for name in ["empty.json", "dependent_simplex.json"] {
        let o = run(&["inspect", path_str(&fixture(name))]);
        assert_eq!(code(&o), 3, "{name}: {}", stderr(&o));
    }
}

#[test]
fn negative_vertex_exits_4() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.json");
    let o = run(&["certify", path_str(&fixture("vertex_negative.json")), "-o", path_str(&out)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("not positive definite on P"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn memory_cap_exits_5() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.json");
    let o = run(&[
        "certify",
        path_str(&fixture("near_singular.json")),
        "-o",
        path_str(&out),
        "--mem-cap-mb",
        "1",
    ]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    assert!(stderr(&o).contains("MB cap"));
}

#[test]
fn time_limit_exits_6() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.json");
    let o = run(&[
        "certify",
        path_str(&fixture("near_singular.json")),
        "-o",
        path_str(&out),
        "--max-seconds",
        "0.3",
    ]);
    assert_eq!(code(&o), 6, "{}", stderr(&o));
    assert!(stderr(&o).contains("time limit"));
}
