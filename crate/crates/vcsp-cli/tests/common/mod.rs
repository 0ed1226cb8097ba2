// Fixture files and a process runner shared by the CLI tests.
#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::Command;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vcsp")
}

/// Runs the binary inside `dir`, returning (exit code, stdout, stderr).
pub fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let output = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("no signal"),
        String::from_utf8(output.stdout).expect("utf-8 stdout"),
        String::from_utf8(output.stderr).expect("utf-8 stderr"),
    )
}

pub fn write_fixtures(dir: &Path) {
    let files: &[(&str, &str)] = &[
        (
            "xor.lang",
            r#"{
  "domain_size": 2,
  "cost_functions": [
    {"name": "xor", "arity": 2, "values": ["1", "0", "0", "1"]}
  ]
}
"#,
        ),
        (
            "neq.lang",
            r#"{
  "domain_size": 2,
  "cost_functions": [
    {"name": "neq", "arity": 2, "values": ["inf", "0", "0", "inf"]}
  ]
}
"#,
        ),
        (
            "neq_closed.lang",
            r#"{
  "domain_size": 2,
  "cost_functions": [
    {"name": "neq", "arity": 2, "values": ["inf", "0", "0", "inf"]},
    {"name": "u00", "arity": 1, "values": ["0", "0"]},
    {"name": "u01", "arity": 1, "values": ["0", "1"]},
    {"name": "u10", "arity": 1, "values": ["1", "0"]},
    {"name": "u11", "arity": 1, "values": ["1", "1"]}
  ]
}
"#,
        ),
        (
            "prefer.lang",
            r#"{
  "domain_size": 2,
  "cost_functions": [
    {"name": "prefer_one", "arity": 1, "values": ["5", "0"]}
  ]
}
"#,
        ),
        (
            "pinned.lang",
            r#"{
  "domain_size": 2,
  "cost_functions": [
    {"name": "xor", "arity": 2, "values": ["1", "0", "0", "1"]},
    {"name": "N_0", "arity": 1, "values": ["0", "inf"]},
    {"name": "N_1", "arity": 1, "values": ["inf", "0"]}
  ]
}
"#,
        ),
        (
            "three.lang",
            r#"{
  "domain_size": 3,
  "cost_functions": [
    {"name": "step", "arity": 1, "values": ["0", "1", "2"]}
  ]
}
"#,
        ),
        (
            "four.lang",
            r#"{
  "domain_size": 4,
  "cost_functions": [
    {"name": "ramp", "arity": 1, "values": ["0", "1", "2", "3"]}
  ]
}
"#,
        ),
        (
            "triangle.inst",
            r#"{
  "domain_size": 2,
  "language_file": "xor.lang",
  "variables": ["a", "b", "c"],
  "constraints": [
    {"scope": ["a", "b"], "function_name": "xor"},
    {"scope": ["b", "c"], "function_name": "xor"},
    {"scope": ["a", "c"], "function_name": "xor"}
  ]
}
"#,
        ),
        (
            "pinned.inst",
            r#"{
  "domain_size": 2,
  "language_file": "pinned.lang",
  "variables": ["a", "b"],
  "constraints": [
    {"scope": ["a", "b"], "function_name": "xor"},
    {"scope": ["a"], "function_name": "N_1"}
  ]
}
"#,
        ),
        (
            "four.inst",
            r#"{
  "domain_size": 4,
  "language_file": "four.lang",
  "variables": ["v"],
  "constraints": [{"scope": ["v"], "function_name": "ramp"}]
}
"#,
        ),
        (
            "min_min.wt",
            r#"{
  "arity": 2,
  "entries": [
    {"operation_table": [0, 0, 0, 1], "weight": "1"},
    {"operation_table": [0, 0, 1, 1], "weight": "-1/2"},
    {"operation_table": [0, 1, 0, 1], "weight": "-1/2"}
  ]
}
"#,
        ),
        ("merge.cong", "{\"classes\": [[0, 2], [1]]}\n"),
        ("clauses.txt", "a b c\nb c d\n"),
    ];
    for (name, text) in files {
        fs::write(dir.join(name), text).expect("fixture written");
    }
}
