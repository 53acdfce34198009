//! The `bvfrob` command line: exit codes, provenance and output formats.

use std::path::PathBuf;

use bv_frobenius::cli::{run_args, Outcome, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use bv_frobenius::models::corpus;
use serde_json::Value;

fn corpus_file(name: &str) -> String {
    corpus::default_dir().join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Outcome {
    run_args(std::iter::once("bvfrob").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).expect("stdout is json")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bvfrob-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn passing_pipeline_exits_zero() {
    let o = run(&["pipeline", "--input", &corpus_file("heisenberg_poisson")]);
    assert_eq!(o.code, EXIT_PASS, "{}", o.stderr);
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["gates"].as_array().unwrap().len(), 10);
}

#[test]
fn math_failure_exits_one_and_names_the_check() {
    let o = run(&["validate", "--input", &corpus_file("filiform_pi12")]);
    assert_eq!(o.code, EXIT_FAIL);
    let r = json(&o);
    assert_eq!(r["first_failure"], "bv: relation[2]");
    let bv = r["gates"].as_array().unwrap().iter().find(|g| g["name"] == "bv").unwrap();
    let failed: Vec<&str> = bv["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["relation[2]"]);
}

#[test]
fn later_gates_are_skipped_after_a_failure() {
    let o = run(&["qme", "--input", &corpus_file("heisenberg_pi12")]);
    assert_eq!(o.code, EXIT_FAIL);
    let r = json(&o);
    let status = |n: &str| {
        r["gates"].as_array().unwrap().iter().find(|g| g["name"] == n).unwrap()["status"].clone()
    };
    assert_eq!(status("degeneration"), "fail");
    assert_eq!(status("qme"), "skipped");
}

#[test]
fn input_errors_exit_two() {
    let missing = run(&["validate", "--input", "/nonexistent/instance.json"]);
    assert_eq!(missing.code, EXIT_INPUT);
    assert!(missing.stdout.is_empty());

    let bad = scratch("malformed.json", "{ \"name\": ");
    assert_eq!(run(&["validate", "--input", bad.to_str().unwrap()]).code, EXIT_INPUT);

    // relabel one basis element so the multiplication table names an unknown label
    let text = std::fs::read_to_string(corpus_file("torus2_mult_flip"))
        .unwrap()
        .replacen("\"label\": \"e1\"", "\"label\": \"zz\"", 1);
    let unknown = scratch("unknown_label.json", &text);
    let o = run(&["validate", "--input", unknown.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_INPUT, "{o:?}");
    assert!(o.stderr.contains("e1"), "{}", o.stderr);

    assert_eq!(run(&["validate", "--input", &corpus_file("torus2"), "--tau-order", "x"]).code, EXIT_INPUT);
    assert_eq!(run(&["frobnicate"]).code, EXIT_INPUT);
}

#[test]
fn parameter_provenance() {
    let flag = json(&run(&["qme", "--input", &corpus_file("torus2"), "--tau-order", "3"]));
    assert_eq!(flag["parameters"]["tau_order"]["value"], 3);
    assert_eq!(flag["parameters"]["tau_order"]["source"], "flag");
    assert_eq!(flag["parameters"]["hbar_order"]["source"], "default");

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(corpus_file("torus2")).unwrap()).unwrap();
    v["truncation"] = serde_json::json!({ "tau_order": 2 });
    let p = scratch("truncated.json", &v.to_string());
    let file = json(&run(&["qme", "--input", p.to_str().unwrap()]));
    assert_eq!(file["parameters"]["tau_order"]["value"], 2);
    assert_eq!(file["parameters"]["tau_order"]["source"], "file");

    let both = json(&run(&["qme", "--input", p.to_str().unwrap(), "--tau-order", "3"]));
    assert_eq!(both["parameters"]["tau_order"]["source"], "flag");
}

#[test]
fn torus_qme_solution_is_linear() {
    let o = run(&["qme", "--input", &corpus_file("torus2"), "--tau-order", "3"]);
    assert_eq!(o.code, EXIT_PASS, "{}", o.stderr);
    let r = json(&o);
    let g = r["gates"].as_array().unwrap().iter().find(|g| g["name"] == "qme").unwrap();
    assert!(g["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    for s in g["details"]["steps"].as_array().unwrap() {
        assert_eq!(s["solution_terms"], 0, "torus correction at order {}", s["order"]);
    }
    assert_eq!(g["details"]["gamma"].as_object().unwrap().len(), 4);
}

#[test]
fn markdown_output() {
    let o = run(&["cyclic", "--input", &corpus_file("torus2"), "--format", "markdown"]);
    assert_eq!(o.code, EXIT_PASS);
    assert!(o.stdout.starts_with("# cyclic report: `torus2`"));
    assert!(o.stdout.contains("Verdict: **PASS**"));
    assert!(o.stdout.contains("| tau_order | 4 | default |"), "{}", o.stdout);
}

#[test]
fn corpus_command_meets_every_expectation() {
    let o = run(&["corpus", "--input", corpus::default_dir().to_str().unwrap()]);
    assert_eq!(o.code, EXIT_PASS, "{}", o.stdout);
    assert_eq!(o, run(&["corpus", "--input", corpus::default_dir().to_str().unwrap()]));
}
