#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

pub fn model(name: &str) -> String {
    models_dir().join(name).display().to_string()
}

pub fn regal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regal"))
        .args(args)
        .env_remove("REGAL_ENUM_CAP")
        .output()
        .expect("run regal")
}

pub fn schema() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validation errors of `doc` against the shipped report schema.
pub fn schema_errors(doc: &Value) -> Vec<String> {
    let schema = schema();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let result = compiled.validate(doc);
    match result {
        Ok(()) => vec![],
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    }
}

/// Invocations with their expected exit codes.
pub fn exit_code_matrix() -> Vec<(Vec<String>, i32)> {
    let f = |name: &str| model(name);
    let rows: Vec<(Vec<String>, i32)> = vec![
        (vec!["check", "sgpe", "--builtin", "dollar", "--v", "2", "--profile", "dolAsBc", "--json"].into_iter().map(String::from).collect(), 0),
        (vec!["check", "sgpe", "--builtin", "zero_one", "--profile", "z1_all_continue"].into_iter().map(String::from).collect(), 1),
        (vec!["check", "nash", "--builtin", "dollar", "--v", "2", "--profile", "dolAsBs", "--depth", "2"].into_iter().map(String::from).collect(), 1),
        (vec!["check", "nash", "--builtin", "zero_one", "--profile", "z1AcBs", "--depth", "4", "--json"].into_iter().map(String::from).collect(), 0),
        (vec!["check", "altl", "--builtin", "zero_one", "--profile", "z1_all_continue"].into_iter().map(String::from).collect(), 1),
        (vec!["check".into(), "ltl".into(), "--file".into(), f("tree.game"), "--profile".into(), "bi".into()], 0),
        (vec!["utility", "--builtin", "infinipede", "--profile", "cent_agu", "--agent", "Bob", "--k", "0", "--json"].into_iter().map(String::from).collect(), 0),
        (vec!["bisim".into(), "--file".into(), f("zigzag.game"), "--left".into(), "zig".into(), "--right".into(), "zag".into()], 1),
        (vec!["escalation", "--builtin", "zero_one", "--json"].into_iter().map(String::from).collect(), 0),
        (vec!["escalation", "--builtin", "infinipede"].into_iter().map(String::from).collect(), 1),
        (vec!["backward-induction", "--builtin", "zero_one", "--depth", "4", "--start", "B", "--json"].into_iter().map(String::from).collect(), 0),
        (vec!["infinite".into(), "--file".into(), f("tree.game")], 1),
        (vec!["parse".into(), "--file".into(), f("costs.game"), "--json".into()], 0),
        (vec!["check", "sgpe", "--builtin", "zero_one", "--profile", "nope"].into_iter().map(String::from).collect(), 2),
        (vec!["check", "sgpe", "--builtin", "zero_one", "--profile", "z1AcBs", "--bogus"].into_iter().map(String::from).collect(), 2),
    ];
    rows
}
