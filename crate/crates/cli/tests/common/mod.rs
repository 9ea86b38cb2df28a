//! Running the `wallkit` binary against the fixture set.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", self.stdout))
    }
}

pub fn wallkit_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wallkit"));
    cmd.args(args).env_remove("WALLKIT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

pub fn wallkit(args: &[&str]) -> Run {
    wallkit_env(args, &[])
}

/// Errors of `instance` against the published schema `name`.
pub fn schema_errors(name: &str, instance: &Value) -> Vec<String> {
    let path = schema_dir().join(format!("{name}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let schema: Value = serde_json::from_str(&text).expect("schema is JSON");
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    v.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path)).collect()
}

pub struct Case {
    pub args: Vec<String>,
    pub env: Vec<(&'static str, &'static str)>,
    pub code: i32,
}

fn case(code: i32, args: &[&str]) -> Case {
    let args = args
        .iter()
        .map(|a| if a.ends_with(".json") && !a.starts_with('/') { fixture(a) } else { a.to_string() })
        .collect();
    Case { args, env: Vec::new(), code }
}

/// Good, violating and malformed inputs for every subcommand, with the expected exit status.
pub fn matrix() -> Vec<Case> {
    let mut m = vec![
        case(0, &["validate", "hexagon.json"]),
        case(0, &["validate", "hexagon_walls.json"]),
        case(0, &["validate", "complete3_chords.json"]),
        case(0, &["validate", "pla4_chords.json"]),
        case(0, &["validate", "patch_fine.json"]),
        case(0, &["validate", "standard_torus_fine.json"]),
        case(0, &["validate", "square_k.json"]),
        case(0, &["validate", "moebius3.json"]),
        case(1, &["validate", "bad_map.json"]),
        case(1, &["validate", "bad_chords.json"]),
        case(1, &["validate", "nonconvex_k.json"]),
        case(2, &["validate", "garbage.json"]),
        case(2, &["validate", "unknown.json"]),
        case(2, &["validate", "malformed_square.json"]),
        case(2, &["validate", "no_such_file.json"]),
        case(0, &["reduce", "kinked_disk.json"]),
        case(0, &["reduce", "complete3_chords.json"]),
        case(0, &["reduce", "hexagon.json"]),
        case(2, &["reduce", "torus_walls.json"]),
        case(2, &["reduce", "patch_fine.json"]),
        case(0, &["distance", "hexagon.json"]),
        case(0, &["distance", "hexagon.json", "--from", "0", "--to", "4"]),
        case(0, &["distance", "complete3_chords.json"]),
        case(0, &["distance", "hexagon_walls.json", "--from", "0"]),
        case(0, &["distance", "patch_fine.json", "--from", "0"]),
        case(0, &["distance", "patch_fine.json"]),
        case(2, &["distance", "hexagon.json", "--from", "99"]),
        case(2, &["distance", "hexagon.json", "--to", "1"]),
        case(2, &["distance", "square_k.json"]),
        case(0, &["fac-check", "hexagon.json"]),
        case(0, &["fac-check", "hexagon_walls.json"]),
        case(0, &["fac-check", "complete3_chords.json"]),
        case(0, &["fac-check", "one_square.json"]),
        case(0, &["fac-check", "triangle_fine.json"]),
        case(0, &["fac-check", "pinwheel_fine.json"]),
        case(1, &["fac-check", "strip2.json"]),
        case(1, &["fac-check", "patch_fine.json"]),
        case(2, &["fac-check", "moebius3.json"]),
        case(2, &["fac-check", "square_torus.json"]),
        case(2, &["fac-check", "garbage.json"]),
        case(0, &["torus-gen", "square_k.json"]),
        case(0, &["torus-gen", "figure_k.json", "--seed", "5"]),
        case(2, &["torus-gen", "standard_triangle.json"]),
        case(2, &["torus-gen", "hexagon.json"]),
        case(2, &["torus-gen", "square_k.json", "--radius", "-1"]),
        case(0, &["klein-min", "--mode", "systole", "4"]),
        case(0, &["klein-min", "--mode", "fac", "8"]),
        case(2, &["klein-min", "--mode", "fac", "3"]),
        case(2, &["klein-min", "--mode", "fac", "1000"]),
        case(2, &["klein-min", "--mode", "area", "4"]),
        case(0, &["cyclic", "hexagon.json"]),
        case(0, &["cyclic", "hexagon_walls.json"]),
        case(0, &["cyclic", "hexagon.json", "--points", "1,3,5"]),
        case(2, &["cyclic", "hexagon.json", "--points", "5,3,1"]),
        case(2, &["cyclic", "moebius3.json"]),
        case(2, &["cyclic", "patch_fine.json"]),
        case(0, &["fine-verify", "patch_fine.json"]),
        case(0, &["fine-verify", "pinwheel_fine.json"]),
        case(0, &["fine-verify", "triangle_fine.json"]),
        case(0, &["fine-verify", "standard_torus_fine.json", "--polygon", "standard_triangle.json"]),
        case(1, &["fine-verify", "standard_torus_fine.json", "--polygon", "square_k.json"]),
        case(2, &["fine-verify", "standard_torus_fine.json"]),
        case(2, &["fine-verify", "hexagon.json"]),
        case(0, &["search", "--boundary", "6", "--max-area", "6", "--kind", "square"]),
        case(0, &["search", "--boundary", "6", "--max-area", "6", "--kind", "fine"]),
        case(0, &["search", "--boundary", "4", "--max-area", "4", "--kind", "fine"]),
        case(0, &["search", "--boundary", "2,3", "--max-area", "6", "--kind", "fine"]),
        case(0, &["search", "--boundary", "4", "--max-area", "2", "--moebius"]),
        case(0, &["search", "--boundary", "8", "--max-area", "6", "--max-nodes", "1000"]),
        case(2, &["search", "--boundary", "5", "--max-area", "3"]),
        case(2, &["search", "--boundary", "2,3", "--max-area", "3", "--kind", "square"]),
        case(2, &["search", "--boundary", "4", "--max-area", "3", "--kind", "fine", "--moebius"]),
        case(2, &["search", "--boundary", "9,9", "--max-area", "3", "--kind", "fine"]),
        case(2, &["search", "--max-area", "3"]),
        case(0, &["convert", "complete3_chords.json", "--to", "square"]),
        case(0, &["convert", "complete3_chords.json", "--to", "map"]),
        case(0, &["convert", "hexagon.json", "--to", "chords"]),
        case(0, &["convert", "hexagon.json", "--to", "map"]),
        case(0, &["convert", "hexagon_walls.json", "--to", "square"]),
        case(0, &["convert", "hexagon.json", "--to", "square"]),
        case(2, &["convert", "kinked_disk.json", "--to", "chords"]),
        case(2, &["convert", "patch_fine.json", "--to", "map"]),
        case(2, &["convert", "complete3_chords.json", "--to", "fine"]),
        case(2, &["convert", "torus_walls.json", "--to", "chords"]),
        case(2, &[]),
        case(2, &["frobnicate"]),
        case(2, &["validate"]),
    ];
    let mut threads = case(0, &["klein-min", "--mode", "fac", "6"]);
    threads.env.push(("WALLKIT_THREADS", "2"));
    m.push(threads);
    let mut zero = case(2, &["klein-min", "--mode", "fac", "6"]);
    zero.env.push(("WALLKIT_THREADS", "0"));
    m.push(zero);
    m
}

/// The schema for a successful or failed run of a subcommand.
pub fn schema_for(args: &[String], code: i32) -> &'static str {
    if code == 2 {
        return "error";
    }
    match args[0].as_str() {
        "validate" => "validate",
        "reduce" => "reduce",
        "distance" => "distance",
        "fac-check" => "fac-check",
        "torus-gen" => "torus-gen",
        "klein-min" => "klein-min",
        "cyclic" => "cyclic",
        "fine-verify" => "fine-verify",
        "search" => "search",
        "convert" => "convert",
        other => panic!("no schema for {other}"),
    }
}

/// Runs the whole matrix; returns one message per mismatch.
pub fn check_matrix() -> Vec<String> {
    let mut problems = Vec::new();
    for c in matrix() {
        let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
        let run = wallkit_env(&args, &c.env);
        let label = format!("wallkit {}", c.args.join(" "));
        if run.code != c.code {
            problems.push(format!("{label}: exit {} (expected {}), stderr {:?}", run.code, c.code, run.stderr));
            continue;
        }
        let payload: Value = match serde_json::from_str(&run.stdout) {
            Ok(v) => v,
            Err(e) => {
                problems.push(format!("{label}: stdout is not JSON: {e}"));
                continue;
            }
        };
        if c.code == 2 && run.stderr.trim().is_empty() {
            problems.push(format!("{label}: no diagnostic on stderr"));
        }
        for e in schema_errors(schema_for(&c.args, c.code), &payload) {
            problems.push(format!("{label}: schema: {e}"));
        }
    }
    problems
}
