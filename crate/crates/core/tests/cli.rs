use std::path::{Path, PathBuf};
use std::process::Command;

use relcor::cli::{run_with, RunManifest};
use relcor::repair::import_tree;
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run_with(std::iter::once("relcor").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn decrement(dir: &Path) -> (String, String) {
    let prog = write(dir, "dec.imp", "int x in 0..3;\nx = x - 1;\n");
    let spec = write(
        dir,
        "inc.json",
        r#"{"type":"predicate","space":{"vars":[{"name":"x","min":0,"max":3}]},"dom":"x < 3","rel":"x' == x + 1"}"#,
    );
    (prog, spec)
}

#[test]
fn relcheck_on_the_lattice() {
    let (code, out) = run(&["relcheck", "--spec", "lattice:R", "--more-correct", "lattice:P4", "lattice:P1"]);
    assert_eq!(code, 0);
    assert!(out.contains("true"), "{out}");

    let (code, out) = run(&["relcheck", "--spec", "lattice:R", "--more-correct", "lattice:P1", "lattice:P2", "--assert"]);
    assert_eq!(code, 1, "{out}");

    assert_eq!(run(&["relcheck", "--spec", "lattice:R", "--correct", "lattice:P8", "--assert"]).0, 0);
    assert_eq!(run(&["relcheck", "--spec", "lattice:R", "--correct", "lattice:P0", "--assert"]).0, 1);

    let (code, out) = run(&["relcheck", "--spec", "lattice:R", "--competence-domain", "lattice:P5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["states"], serde_json::json!(["s=1", "s=2"]));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(run(&["relcheck", "--spec", &bad, "--correct", "lattice:P0"]).0, 2);
    let prog = write(dir.path(), "bad.imp", "int x in 0..3;\nx = ;\n");
    assert_eq!(run(&["semantics", "--program", &prog]).0, 2);
    assert_eq!(run(&["mutate", "--program", "/nonexistent/p.imp"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["demo", "nosuchstudy"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn semantics_prints_the_program_function() {
    let dir = tempfile::tempdir().unwrap();
    let (prog, _) = decrement(dir.path());
    let (code, out) = run(&["semantics", "--program", &prog]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    // x = 0 would leave the interval, so only three pairs
    assert_eq!(v["pairs"].as_array().unwrap().len(), 3);

    let correct = fixtures().join("fermat_correct.imp");
    let (code, out) = run(&["semantics", "--program", correct.to_str().unwrap(), "--input", "n=21 x=0 y=0", "--wide"]);
    assert_eq!(code, 0);
    assert!(out.contains("n=21 x=5 y=2"), "{out}");
}

#[test]
fn mutate_lists_48_fermat_mutants() {
    let dir = tempfile::tempdir().unwrap();
    let base = fixtures().join("fermat_base.imp");
    let (code, out) = run(&["mutate", "--program", base.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Vec<Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(v.len(), 48);
    assert!(v.iter().all(|m| m["operator"] == "AORB"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 48);
    let m1 = std::fs::read_to_string(dir.path().join("m1.imp")).unwrap();
    assert!(relcor::toylang::parse(&m1).is_ok());
}

#[test]
fn repair_writes_tree_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (prog, spec) = decrement(dir.path());
    let json = dir.path().join("tree.json");
    let dot = dir.path().join("tree.dot");
    let manifest = dir.path().join("manifest.json");
    for mode in ["exact", "testing"] {
        let (code, out) = run(&[
            "repair", "--spec", &spec, "--program", &prog, "--mode", mode,
            "--json-out", json.to_str().unwrap(),
            "--dot-out", dot.to_str().unwrap(),
            "--manifest-out", manifest.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{out}");
        let tree = import_tree(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(tree.metrics.fault_depth_ub, Some(1));
        let sol = &tree.tree.nodes[tree.tree.solutions[0]];
        assert_eq!(sol.program.body.to_string().trim(), "x = x + 1;");
        assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
        let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
        assert_eq!(m.config["mode"], mode);
        assert!(m.artifacts.iter().any(|a| a.ends_with("tree.json")));
    }
    let (code, out) = run(&["report", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().contains("absolutely_correct"), "{out}");
}

#[test]
fn repair_with_random_tests_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let (prog, spec) = decrement(dir.path());
    let (code, out) = run(&["repair", "--spec", &spec, "--program", &prog, "--tests", "random:5", "--seed", "7", "--bounds", "x=0..2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(run(&["repair", "--spec", &spec, "--program", &prog, "--tests", "sideways"]).0, 2);
    assert_eq!(run(&["repair", "--spec", &spec, "--program", &prog, "--bounds", "x=5"]).0, 2);
}

#[test]
fn demo_bundle_and_seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_relcor"))
        .args(["demo", "lattice", "--out", out])
        .env("RELCOR_SEED", "1234")
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let bundle = dir.path().join("lattice");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(bundle.join("report.json")).unwrap()).unwrap();
    assert!(report["facts"].as_array().unwrap().iter().all(|f| f["ok"] == true));
    assert!(std::fs::read_to_string(bundle.join("hasse.dot")).unwrap().contains("P7"));
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(bundle.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m.seed, 1234);

    let (code, table) = run(&["report", bundle.join("report.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(table.contains("lattice"), "{table}");
}

#[test]
fn demo_fails_on_a_wrong_expectation() {
    let dir = tempfile::tempdir().unwrap();
    for f in std::fs::read_dir(fixtures()).unwrap() {
        let f = f.unwrap().path();
        std::fs::copy(&f, dir.path().join(f.file_name().unwrap())).unwrap();
    }
    let exp = dir.path().join("lattice_expect.json");
    let text = std::fs::read_to_string(&exp).unwrap().replace(r#""correct": ["P7", "P8", "P9"]"#, r#""correct": ["P7"]"#);
    std::fs::write(&exp, text).unwrap();
    let out = dir.path().join("out");
    let (code, _) = run(&["demo", "lattice", "--fixtures", dir.path().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
}
