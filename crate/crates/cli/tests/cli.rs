use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use arbordet::{parse_expr, Weight};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arbordet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let output = run(args);
    assert!(
        output.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf-8 output")
}

fn canonical(text: &str) -> arbordet::Expr {
    parse_expr(text).unwrap().normalize().unwrap()
}

#[test]
fn det_methods_agree_on_numeric_inputs() {
    let dense = fixture("dense3_ones.json");
    let dense = dense.to_str().unwrap();
    for method in [
        "tree",
        "reference",
        "factor-sequential",
        "factor-partitioned",
    ] {
        let out = stdout_of(&["det", dense, "--method", method]);
        assert_eq!(out.trim(), "16", "method {method}");
    }

    let identity = fixture("identity3.csv");
    let out = stdout_of(&["det", identity.to_str().unwrap(), "--method", "reference"]);
    assert_eq!(out.trim(), "1");

    let upper = fixture("upper3_numeric.json");
    let out = stdout_of(&["det", upper.to_str().unwrap(), "--method", "tree"]);
    assert_eq!(out.trim(), "75");

    let graph = fixture("graph3.json");
    for method in ["tree", "reference", "factor-partitioned"] {
        let out = stdout_of(&["det", graph.to_str().unwrap(), "--method", method]);
        assert_eq!(out.trim(), "60", "method {method}");
    }
}

#[test]
fn det_factor_sequential_prints_the_factored_expression() {
    let dense = fixture("dense3.json");
    let out = stdout_of(&[
        "det",
        dense.to_str().unwrap(),
        "--method",
        "factor-sequential",
    ]);
    let expected = "u11·(u12 + u22)·(u13 + u23 + u33) + u11·u32·(u13 + u33) \
                    + (u21 + u31)·u22·(u23 + u33) + u21·u22·u13 \
                    + u31·(u12 + u32)·u33 + u21·u32·u33";
    assert_eq!(canonical(out.trim()), canonical(expected));
    // the printed expression stays factored rather than expanded
    assert!(out.contains("·("));
}

#[test]
fn det_tree_expands_symbolic_inputs() {
    let upper = fixture("upper3.json");
    let out = stdout_of(&["det", upper.to_str().unwrap(), "--method", "tree"]);
    assert_eq!(
        canonical(out.trim()),
        canonical("u11·(u12 + u22)·(u13 + u23 + u33)")
    );
}

#[test]
fn enumerate_lists_every_arborescence_and_the_sum() {
    let dense = fixture("dense3_ones.json");
    let out = stdout_of(&["enumerate", dense.to_str().unwrap()]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 17);
    for line in &lines[..16] {
        assert!(line.contains(" : "), "arborescence line: {line}");
    }
    assert_eq!(lines[16], "16");
}

#[test]
fn verify_prints_a_summary_table() {
    let out = stdout_of(&["verify", "--seed", "42", "--cases", "40"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "seed: 42");
    for name in ["moving-arc", "combining-arcs", "root-split", "matrix-tree"] {
        assert!(
            lines.iter().any(|l| l.starts_with(&format!("{name}: "))),
            "missing suite line for {name}"
        );
    }
    assert_eq!(*lines.last().unwrap(), "40/40 passed");
}

#[test]
fn factor_sequential_emits_six_terms() {
    let dense = fixture("dense3.json");
    let out = stdout_of(&[
        "factor",
        dense.to_str().unwrap(),
        "--strategy",
        "sequential",
    ]);
    assert!(out.starts_with("strategy: sequential\n"));
    let terms: Vec<&str> = out.lines().filter(|l| l.starts_with("term ")).collect();
    assert_eq!(terms.len(), 6);
    assert!(out.contains("\nterms: 6\n"));
}

#[test]
fn factor_partitioned_emits_ordered_bell_many_terms() {
    let dense = fixture("dense3.json");
    let out = stdout_of(&[
        "factor",
        dense.to_str().unwrap(),
        "--strategy",
        "partitioned",
    ]);
    assert!(out.starts_with("strategy: partitioned\n"));
    assert!(out.contains("\nterms: 13\n"));
}

#[test]
fn factor_respects_an_explicit_order() {
    let dense = fixture("dense3.json");
    let reversed = stdout_of(&[
        "factor",
        dense.to_str().unwrap(),
        "--strategy",
        "sequential",
        "--order",
        "3,2,1",
    ]);
    let first_term = reversed.lines().find(|l| l.starts_with("term 1")).unwrap();
    assert!(first_term.starts_with("term 1 [3,2,1]:"), "{first_term}");

    // different orders, same expanded determinant
    let ascending = stdout_of(&[
        "factor",
        dense.to_str().unwrap(),
        "--strategy",
        "sequential",
    ]);
    let total = |text: &str| {
        let line = text
            .lines()
            .find(|l| l.starts_with("total: "))
            .expect("total line");
        canonical(line.trim_start_matches("total: "))
    };
    assert_eq!(total(&reversed), total(&ascending));
}

#[test]
fn factor_emit_dot_writes_numbered_files_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let upper = fixture("upper3.json");
    let out = stdout_of(&[
        "factor",
        upper.to_str().unwrap(),
        "--strategy",
        "sequential",
        "--emit-dot",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.contains("manifest.json"));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["strategy"], "sequential");
    let files = manifest["files"].as_array().unwrap();
    assert!(!files.is_empty());
    assert_eq!(files[0]["file"], "0000.dot");
    assert_eq!(files[0]["step"], "start");
    let steps: Vec<&str> = files.iter().map(|f| f["step"].as_str().unwrap()).collect();
    for step in ["rooted", "isolated", "leaf"] {
        assert!(steps.contains(&step), "missing step {step}");
    }
    for file in files {
        let name = file["file"].as_str().unwrap();
        let body = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(body.starts_with("digraph {"), "{name} is not DOT");
    }
}

#[test]
fn export_dot_writes_the_graph_and_the_isolated_variant() {
    let dir = tempfile::tempdir().unwrap();
    let upper = fixture("upper3.json");
    stdout_of(&[
        "export-dot",
        upper.to_str().unwrap(),
        dir.path().to_str().unwrap(),
        "--isolate",
        "1",
    ]);

    let graph = std::fs::read_to_string(dir.path().join("graph.dot")).unwrap();
    assert!(graph.contains("0 [shape=doublecircle];"));
    for edge in [
        "1 -> 2 [label=\"u12\"];",
        "1 -> 3 [label=\"u13\"];",
        "2 -> 3 [label=\"u23\"];",
        "0 -> 1 [label=\"u11\"];",
        "0 -> 2 [label=\"u22\"];",
        "0 -> 3 [label=\"u33\"];",
    ] {
        assert!(graph.contains(edge), "missing edge {edge}");
    }

    let isolated = std::fs::read_to_string(dir.path().join("isolated-1.dot")).unwrap();
    assert!(isolated.contains("0 -> 2 [label=\"u12 + u22\"];"));
    assert!(isolated.contains("0 -> 3 [label=\"u13 + u33\"];"));
    assert!(isolated.contains("2 -> 3 [label=\"u23\"];"));
    assert!(!isolated.contains("1 -> "));
}

#[test]
fn exit_codes_follow_the_contract() {
    let missing = run(&["det", "/definitely/not/a/file.json"]);
    assert_eq!(missing.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"neither\": true}").unwrap();
    let shape = run(&["det", bad.to_str().unwrap()]);
    assert_eq!(shape.status.code(), Some(1));

    // a 10x10 dense matrix overflows the enumeration guard
    let big = dir.path().join("big.csv");
    let mut rows = Vec::new();
    for i in 0..10 {
        let row: Vec<String> = (0..10)
            .map(|j| {
                if i == j {
                    "10".into()
                } else {
                    "-1".to_string()
                }
            })
            .collect();
        rows.push(row.join(","));
    }
    std::fs::write(&big, rows.join("\n")).unwrap();
    let guarded = run(&["det", big.to_str().unwrap(), "--method", "tree"]);
    assert_eq!(guarded.status.code(), Some(2));
    // the reference method handles the same input fine
    let reference = run(&["det", big.to_str().unwrap(), "--method", "reference"]);
    assert_eq!(reference.status.code(), Some(0));

    let bad_order = run(&[
        "factor",
        fixture("dense3.json").to_str().unwrap(),
        "--strategy",
        "sequential",
        "--order",
        "1,2",
    ]);
    assert_eq!(bad_order.status.code(), Some(1));
}
