use jsonschema::JSONSchema;
use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn remedy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remedy"))
        .args(args)
        .env_remove("REMEDY_SOLVER")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> Value {
    serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap()
}

fn validate(schema: &Value, v: &Value) {
    let compiled = JSONSchema::compile(schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(v) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("{v} violates the schema: {msgs:?}");
    };
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = remedy(&full);
    let v: Value = serde_json::from_str(&stdout(&o)).expect("json report");
    validate(&schema(), &v);
    (code(&o), v)
}

fn example_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&remedy(&["check", "(a*)*"])), 3);
    assert_eq!(code(&remedy(&["check", "[^=]*=.*"])), 0);
    let (c, v) = json_report(&["check", r"(a*)\1"]);
    assert_eq!(c, 3);
    assert_eq!(v["result"]["satisfies"], false);
}

#[test]
fn parse_error_exits_one() {
    let o = remedy(&["check", "("]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    let (c, v) = json_report(&["match", "(", "x"]);
    assert_eq!(c, 1);
    assert!(v["error"].is_string());
}

#[test]
fn match_reports_captures() {
    let (c, v) = json_report(&["match", r"(a*)\1", "aa"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["accepted"], true);
    assert_eq!(v["result"]["captures"]["1"], "a");
    let text = stdout(&remedy(&["match", "(a*)*", "ab"]));
    assert!(text.starts_with("accepted false"), "{text}");
}

#[test]
fn repair_from_example_files() {
    let pos = example_file("=\nabcd==\n==abcd\nab=c\n#negative\nabc\n");
    let (c, v) = json_report(&["repair", ".*.*=.*", "--pos", pos.path().to_str().unwrap()]);
    assert_eq!(c, 0);
    validate(&schema()["definitions"]["repair_result"], &v["result"]);
    assert_eq!(v["result"]["status"], "repaired");
    assert_eq!(v["result"]["examples"]["negatives"], serde_json::json!(["abc"]));
    let out = v["result"]["output"].as_str().unwrap().to_string();
    assert_eq!(code(&remedy(&["check", &out])), 0);
    assert_eq!(stdout(&remedy(&["match", &out, "abc"])).lines().next(), Some("accepted false"));
}

#[test]
fn repair_with_generated_examples() {
    let (c, v) = json_report(&["repair", "(a|aa)*c", "--gen", "--timeout", "20"]);
    assert_eq!(c, 0);
    validate(&schema()["definitions"]["repair_result"], &v["result"]);
    let out = v["result"]["output"].as_str().unwrap().to_string();
    assert_eq!(code(&remedy(&["check", &out])), 0);
    let (_, already) = json_report(&["repair", "ab", "--gen"]);
    assert_eq!(already["result"]["status"], "already_ltp");
}

#[test]
fn repair_rejects_inconsistent_examples() {
    let pos = example_file("b\n");
    let o = remedy(&["repair", "a*", "--pos", pos.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn repair_reports_timeout() {
    let o = remedy(&["repair", "(a*)*b", "--gen", "--timeout", "0.000001"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&remedy(&["repair", "(a*)*b", "--gen", "--timeout", "-1"])), 1);
}

#[test]
fn external_solver_matches_internal() {
    let run = |solver: Option<String>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_remedy"));
        cmd.args(["--json", "repair", ".*.*=.*", "--gen", "--seed", "3"]);
        match solver {
            Some(s) => cmd.env("REMEDY_SOLVER", s),
            None => cmd.env_remove("REMEDY_SOLVER"),
        };
        let o = cmd.output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["result"]["status"].clone()
    };
    let external = format!("exec:{}", env!("CARGO_BIN_EXE_remedy-dimacs"));
    assert_eq!(run(Some(external)), "repaired");
    assert_eq!(run(None), "repaired");
    let bad = Command::new(env!("CARGO_BIN_EXE_remedy"))
        .args(["repair", ".*.*=.*", "--gen"])
        .env("REMEDY_SOLVER", "bogus")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn dimacs_solver_round_trip() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_remedy-dimacs"))
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"p cnf 2 3\n1 2 0\n-1 0\n-2 0\n").unwrap();
    let out = String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap();
    assert!(out.contains("UNSAT"), "{out}");
}

#[test]
fn gen_is_deterministic_and_valid() {
    let a = json_report(&["gen", "[a-c]+@x", "--count", "5", "--seed", "9"]).1;
    let b = json_report(&["gen", "[a-c]+@x", "--count", "5", "--seed", "9"]).1;
    assert_eq!(a["result"], b["result"]);
    let pos = a["result"]["positives"].as_array().unwrap();
    let neg = a["result"]["negatives"].as_array().unwrap();
    assert!(!pos.is_empty() && !neg.is_empty());
    for w in pos {
        assert!(stdout(&remedy(&["match", "[a-c]+@x", w.as_str().unwrap()])).starts_with("accepted true"));
    }
    for w in neg {
        assert!(stdout(&remedy(&["match", "[a-c]+@x", w.as_str().unwrap()])).starts_with("accepted false"));
    }
}

#[test]
fn similarity_of_overlapping_languages() {
    let (c, v) = json_report(&["similarity", "[ab]", "[bc]"]);
    assert_eq!(c, 0);
    let f1 = v["result"]["f1"].as_f64().unwrap();
    assert!(f1 > 0.0 && f1 < 1.0, "{f1}");
    let (_, same) = json_report(&["similarity", "a|b", "[ab]"]);
    assert_eq!(same["result"]["f1"].as_f64(), Some(1.0));
}

#[test]
fn localize_lists_vulnerable_spans() {
    let (c, v) = json_report(&["localize", "c(b*)(a*)*"]);
    assert_eq!(c, 0);
    let found = v["result"]["vulnerable"].as_array().unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0]["subexpression"], "(a*)*");
    let (_, none) = json_report(&["localize", "abc"]);
    assert!(none["result"]["vulnerable"].as_array().unwrap().is_empty());
}

#[test]
fn corpus_records_bad_lines() {
    let file = example_file("(a|aa)*c\n(\n\nab\n");
    let o = remedy(&["--json", "corpus", file.path().to_str().unwrap(), "--timeout", "20"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let record_schema = &schema()["definitions"]["corpus_record"];
    for r in &lines[..lines.len() - 1] {
        validate(record_schema, r);
    }
    let statuses: Vec<&str> = lines[..lines.len() - 1].iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["repaired", "error", "already_ltp"]);
    let summary = &lines.last().unwrap()["summary"];
    assert_eq!(summary["entries"], 3);
    assert_eq!(summary["errors"], 1);
}

#[test]
fn corpus_empty_file() {
    let file = example_file("");
    let o = remedy(&["--json", "corpus", file.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["summary"]["entries"], 0);
    assert_eq!(code(&remedy(&["corpus", "/nonexistent/corpus.txt"])), 1);
}
