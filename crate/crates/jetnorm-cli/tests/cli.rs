use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn jetnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetnorm")).args(args).env_remove("JETNORM_MAX_COLUMNS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = jetnorm(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).unwrap())
}

fn schema() -> jsonschema::JSONSchema {
    let raw: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    jsonschema::JSONSchema::compile(&raw).unwrap()
}

fn assert_valid(v: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}\n{v:#}");
}

#[test]
fn nf_example_removes_the_square() {
    let o = jetnorm(&["nf", "--group", "two-sided", "--vars", "x,y", "--order", "4", "[x+x^2,0;0,y]"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("B = [x, 0; 0, y]"), "{out}");
    assert!(out.contains("certificate verified"), "{out}");
    let (code, v) = json(&["nf", "--vars", "x,y", "--order", "4", "[x+x^2,0;0,y]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["normal_form"]["text"], "[x, 0; 0, y]");
    assert_eq!(v["result"]["certificate_check"]["ok"], true);
    assert_valid(&v);
}

#[test]
fn smith_example_sorts_orders() {
    let o = jetnorm(&["smith", "--vars", "x", "--order", "5", "[x^2,0;0,x]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("B = [x, 0; 0, x^2]"));
    let (_, v) = json(&["smith", "--vars", "x", "--order", "5", "[x^2,0;0,x]"]);
    assert_eq!(v["result"]["orders"], serde_json::json!([1, 2]));
    assert_eq!(v["result"]["verified"], true);
    assert_valid(&v);
}

#[test]
fn conjugacy_determinacy_fails_on_the_trace() {
    let args = ["determinacy", "--group", "conjugacy", "--vars", "x", "--order", "4", "--k", "0", "[1,0;0,1]"];
    let o = jetnorm(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trace obstruction"));
    let (_, v) = json(&args);
    assert_eq!(v["result"]["first_failure"], 1);
    assert_eq!(v["result"]["degrees"][0]["trace_obstruction"], true);
    assert_valid(&v);
}

#[test]
fn verify_pde_and_equiv_reports_validate() {
    let (code, v) = json(&["verify-pde", "--vars", "x,y", "--order", "4", "--normalize", "[x + y^2 + x*y, x^3; y^2, y]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["report"]["passed"], true);
    assert_eq!(v["result"]["report"]["k"], 1);
    assert_valid(&v);
    let (code, v) = json(&["equiv", "--vars", "x", "--order", "3", "[x + x^2]", "[x]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["found"], true);
    assert_eq!(v["result"]["verified"], true);
    assert_valid(&v);
}

#[test]
fn gaussian_field_and_full_g() {
    let (code, v) = json(&["nf", "--field", "gaussian", "--vars", "x", "--order", "3", "[i*x + x^2]"]);
    assert_eq!(code, 0);
    assert_eq!(v["input"]["field"], "gaussian");
    assert_valid(&v);
    let (code, v) = json(&["nf", "--full-g", "--vars", "x", "--order", "3", "[2 + x, x; 1, x^2]"]);
    assert_eq!(code, 0);
    assert!(v["result"]["preprocessing"].is_object());
    assert_valid(&v);
}

#[test]
fn explain_dumps_each_degree() {
    let (code, v) = json(&["nf", "--explain", "--vars", "x", "--order", "2", "[x]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["explain"].as_array().unwrap().len(), 2);
    assert_valid(&v);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let args = ["nf", "--json", "--vars", "x,y", "--order", "4", "[x + y^2, x*y; x^2, y + x^3]"];
    let a = jetnorm(&args);
    let b = jetnorm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn matrices_from_files_and_stdin() {
    let dir = std::env::temp_dir().join(format!("jetnorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a.txt");
    std::fs::write(&path, "[ x + x^2 , 0 ;\n  0 , y ]\n").unwrap();
    let from_file = jetnorm(&["nf", "--vars", "x,y", "--order", "4", path.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    let mut child = Command::new(env!("CARGO_BIN_EXE_jetnorm"))
        .args(["nf", "--vars", "x,y", "--order", "4", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"[x + x^2, 0; 0, y]").unwrap();
    let from_stdin = child.wait_with_output().unwrap();
    assert_eq!(from_stdin.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
    let missing = jetnorm(&["nf", dir.join("missing.txt").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_input_exits_3() {
    let (code, v) = json(&["nf", "--vars", "x,y", "[x + z]"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("'z'"));
    assert_valid(&v);
    let (code, v) = json(&["nf", "--vars", "x", "[x, 1; 1]"]);
    assert_eq!(code, 3);
    assert_valid(&v);
    let (code, _) = json(&["nf", "--group", "conjugacy", "--vars", "x", "[x, 1]"]);
    assert_eq!(code, 3);
    assert_eq!(jetnorm(&["nf", "--group", "sideways", "[x]"]).status.code(), Some(3));
    assert_eq!(jetnorm(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn column_guardrail_exits_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_jetnorm"))
        .args(["nf", "--json", "--vars", "x,y", "[x, y; y, x]"])
        .env("JETNORM_MAX_COLUMNS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "guardrail");
    assert_valid(&v);
    assert_eq!(jetnorm(&["nf", "--max-columns", "3", "--vars", "x,y", "[x, y; y, x]"]).status.code(), Some(2));
}

#[test]
fn terms_above_the_order_warn() {
    let (code, v) = json(&["nf", "--vars", "x", "--order", "2", "[x + x^5]"]);
    assert_eq!(code, 0);
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    assert_eq!(v["input"]["matrices"][0]["text"], "[x]");
}

#[test]
fn schema_rejects_malformed_reports() {
    let (_, mut v) = json(&["smith", "--vars", "x", "--order", "3", "[x]"]);
    assert_valid(&v);
    v["result"]["orders"] = serde_json::json!(["one"]);
    assert!(!schema().is_valid(&v));
    let (_, mut v) = json(&["nf", "--vars", "x", "--order", "2", "[x]"]);
    v["input"]["group"] = "diagonal".into();
    assert!(!schema().is_valid(&v));
}
