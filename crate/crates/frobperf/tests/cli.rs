use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frobperf::core::fpalg::PresentationOptions;
use frobperf::{json, run_script, Config, ScriptError};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(src: &str) -> Result<(Value, i32), ScriptError> {
    let out = run_script(src, &fixtures(), &Config::default())?;
    Ok((out.document, out.exit_code))
}

fn binary(args: &[&str], script: &str) -> Output {
    let dir = std::env::temp_dir().join(format!("frobperf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let name = format!("s{:x}.fp", script.len() * 31 + script.bytes().map(usize::from).sum::<usize>());
    let path = dir.join(name);
    std::fs::write(&path, script).unwrap();
    Command::new(env!("CARGO_BIN_EXE_frobperf")).arg("run").arg(&path).args(args).output().unwrap()
}

#[test]
fn definite_answers_exit_zero() {
    let out = binary(&[], "base R = GF(3)[u] / ()\nalgebra A over R = [x] / (x^3 - x - u)\npreperfect A\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &doc["results"][0];
    assert_eq!(r["status"], "stabilized");
    assert_eq!(r["at"], 1);
    assert_eq!(r["command"], "preperfect A");
}

#[test]
fn budget_exhaustion_exits_two() {
    let src = "base R = GF(3)[u]\nalgebra A over R = [x, y, t] / (x*y - u, t*(x - y) - 1)\npreperfect A steps 3\n";
    let out = binary(&["--max-degree", "8"], src);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"][0]["status"], "truncated");
    assert_eq!(doc["config"]["max_degree"], 8);
}

#[test]
fn syntax_errors_report_position() {
    let out = binary(&[], "base R = GF(3)[u]\nalgbra A over R = [x]\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2:1: syntax error: found `algbra`"), "{err}");
    assert!(err.contains("algebra"), "{err}");
}

#[test]
fn json_flag_writes_the_report() {
    let target = std::env::temp_dir().join(format!("frobperf-report-{}.json", std::process::id()));
    let out = binary(&["--json", target.to_str().unwrap()], "base P = GF(5)[x, y] / (x*y, x + y - 1)\npi0 P\n");
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&target).unwrap();
    assert_eq!(written, out.stdout);
    let doc: Value = serde_json::from_slice(&written).unwrap();
    assert_eq!(doc["results"][0]["components"], 2);
    assert_eq!(doc["results"][0]["idempotents"], serde_json::json!(["x", "y"]));
}

#[test]
fn zero_algebra_needs_opt_in() {
    let err = run("base R = GF(3)[u]\nalgebra A over R = [x] / (1)").err().unwrap();
    assert!(matches!(err, ScriptError::Semantic { ref message, .. } if message.contains("zero algebra")), "{err}");
    assert!(run("base R = GF(3)[u]\nalgebra A over R = [x] / (1) allow_zero").is_ok());
}

#[test]
fn semantic_errors() {
    let cases = [
        ("algebra A over S = [x]", "unknown name `S`"),
        ("base R = GF(4)[u]", "4"),
        ("base R = GF(3)[u]\nbase R = GF(3)[v]", "already defined"),
        ("base R = GF(3)[u]\nalgebra A over R = [x] / (x^2 + w)", "bad polynomial"),
        ("base R = GF(3)[u]\nalgebra A over R = [x]\nmorphism f : A -> A = {x -> x, x -> u}", "mapped twice"),
    ];
    for (src, needle) in cases {
        match run(src) {
            Err(e) => assert!(e.to_string().contains(needle), "{src}: {e}"),
            Ok(_) => assert!(needle.is_empty(), "{src} was accepted"),
        }
    }
    let err = run("base R = GF(3)[u]\nalgebra A over R = [x] / (x^2 + w)").err().unwrap();
    assert_eq!(err.pos().line, 2);
    assert_eq!(err.pos().col, 33);
}

#[test]
fn failing_commands_do_not_stop_the_run() {
    let (doc, code) = run("base R = GF(3)[u]\nkernel R\nunramified R").unwrap();
    assert_eq!(code, 1);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results[0]["exit"], 1);
    assert_eq!(results[0]["kind"], "semantic");
    assert_eq!(results[1]["exit"], 0);
}

#[test]
fn pregroupoid_commands() {
    let (doc, code) = run("pregroupoid T = \"tree.json\"\ngpd-close T\ngpd-close broken.json\ngpd-close cycle.json").unwrap();
    assert_eq!(code, 1);
    let r = doc["results"].as_array().unwrap();
    assert_eq!(r[0]["arrows"], 9);
    assert_eq!(r[0]["bijective"], serde_json::json!({ "pairs": true, "triples": true }));
    assert_eq!(r[1]["status"], "invalid");
    assert_eq!(r[2]["exit"], 2);
    assert!(r[2]["status"] == "iteration_limit" || r[2]["status"] == "arrow_limit");
}

fn presentations(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("base") && m.contains_key("vars") && m.contains_key("relations") {
                out.push(v.clone());
            }
            m.values().for_each(|x| presentations(x, out));
        }
        Value::Array(a) => a.iter().for_each(|x| presentations(x, out)),
        _ => {}
    }
}

#[test]
fn emitted_presentations_round_trip() {
    let src = std::fs::read_to_string(fixtures().join("acceptance.fp")).unwrap();
    let (doc, _) = run(&src).unwrap();
    let mut found = Vec::new();
    presentations(&doc, &mut found);
    assert!(found.len() > 20);
    for v in found {
        let p = json::presentation_from(&v, &PresentationOptions::default()).unwrap();
        assert_eq!(json::presentation(&p), v);
    }
}

#[test]
fn runs_are_deterministic() {
    let src = std::fs::read_to_string(fixtures().join("acceptance.fp")).unwrap();
    let a = frobperf::render(&run(&src).unwrap().0);
    let b = frobperf::render(&run(&src).unwrap().0);
    assert_eq!(a, b);
}
