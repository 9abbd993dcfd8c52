//! Golden CLI corpus: every fixture invocation with the exit code it must
//! produce, plus helpers to run the real binary.

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the built binary with `args`; `.json` arguments are resolved
/// against the fixture directory unless they are absolute.
pub fn qcompat(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcompat"));
    cmd.env_remove("QCOMPAT_TOL_EIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    for a in args {
        if a.ends_with(".json") && !Path::new(a).is_absolute() {
            cmd.arg(fixture(a));
        } else {
            cmd.arg(a);
        }
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub const VALID: &[&str] = &[
    "zero.json",
    "one.json",
    "mixed.json",
    "counter_a.json",
    "counter_b.json",
    "phase.json",
    "qutrit.json",
    "tiny_eig.json",
    "three_observer_c.json",
];

/// (arguments, expected exit code). Covers valid inputs, every schema and
/// state error, usage errors and corrupted witness files.
pub const CASES: &[(&[&str], i32)] = &[
    // valid states
    (&["validate", "zero.json"], 0),
    (&["validate", "mixed.json"], 0),
    (&["validate", "counter_b.json"], 0),
    (&["validate", "phase.json"], 0),
    (&["validate", "qutrit.json"], 0),
    (&["support", "counter_b.json"], 0),
    (&["support", "qutrit.json"], 0),
    // invalid states
    (&["validate", "non_hermitian.json"], 1),
    (&["validate", "not_psd.json"], 1),
    (&["validate", "trace_two.json"], 1),
    (&["support", "not_psd.json"], 1),
    // file and schema errors
    (&["validate", "malformed.json"], 2),
    (&["validate", "not_a_number.json"], 2),
    (&["validate", "unknown_field.json"], 2),
    (&["validate", "schema_v2.json"], 2),
    (&["validate", "missing_schema.json"], 2),
    (&["validate", "extra_row.json"], 2),
    (&["validate", "short_row.json"], 2),
    (&["validate", "dim_zero.json"], 2),
    (&["validate", "does_not_exist.json"], 2),
    (&["support", "malformed.json"], 2),
    // compatibility checks
    (&["check", "mixed.json", "mixed.json"], 0),
    (&["check", "zero.json", "one.json"], 1),
    (&["check", "counter_a.json", "counter_b.json"], 0),
    (
        &[
            "check",
            "counter_a.json",
            "counter_b.json",
            "--criterion",
            "bfm",
        ],
        0,
    ),
    (
        &[
            "check",
            "counter_a.json",
            "counter_b.json",
            "--criterion",
            "pi",
        ],
        1,
    ),
    (
        &[
            "check",
            "counter_a.json",
            "counter_b.json",
            "--criterion",
            "pii",
        ],
        0,
    ),
    (
        &[
            "check",
            "counter_a.json",
            "counter_b.json",
            "--criterion",
            "all",
        ],
        1,
    ),
    (&["check", "zero.json", "one.json", "--criterion", "pi"], 0),
    (&["check", "qutrit.json", "three_observer_c.json"], 0),
    (&["check", "zero.json", "mixed.json", "counter_b.json"], 0),
    (&["check", "zero.json", "one.json", "mixed.json"], 1),
    (&["check", "zero.json", "not_psd.json"], 1),
    (&["check", "zero.json", "schema_v2.json"], 2),
    (&["check", "zero.json", "qutrit.json"], 2),
    (&["check", "zero.json"], 2),
    (
        &["check", "zero.json", "one.json", "--criterion", "bogus"],
        2,
    ),
    // decomposition and witness
    (&["decompose", "counter_a.json", "counter_b.json"], 0),
    (&["decompose", "zero.json", "one.json"], 1),
    (&["decompose", "zero.json", "qutrit.json"], 2),
    (&["witness", "counter_a.json", "counter_b.json"], 0),
    (&["witness", "mixed.json", "phase.json"], 0),
    (&["witness", "zero.json", "one.json"], 1),
    (&["witness", "zero.json", "trace_two.json"], 1),
    (&["witness", "zero.json", "qutrit.json"], 2),
    // simulation of stored witnesses
    (&["simulate", "witness_counter.json"], 0),
    (&["simulate", "witness_wrong_state.json"], 1),
    (&["simulate", "report_counter.json"], 2),
    (&["simulate", "witness_zero_branch.json"], 2),
    (&["simulate", "witness_bad_dims.json"], 2),
    (&["simulate", "zero.json"], 2),
    (&["simulate", "malformed.json"], 2),
    // usage
    (&[], 2),
    (&["frobnicate"], 2),
    (&["validate"], 2),
    (&["--tol-eig", "-1", "validate", "zero.json"], 2),
    (&["--tol-eig", "abc", "validate", "zero.json"], 2),
    (
        &["--tol-overlap=-1e-7", "check", "zero.json", "one.json"],
        2,
    ),
    (&["--help"], 0),
];

/// Runs every corpus case and returns a description of each mismatch.
/// Input errors must leave a diagnostic on stderr; rejections report
/// either a verdict on stdout or a diagnostic.
pub fn check_corpus() -> Vec<String> {
    let mut bad = Vec::new();
    for (args, want) in CASES {
        let r = qcompat(args, &[]);
        if r.code != *want {
            bad.push(format!(
                "{args:?}: exit {} (want {want}); stderr: {}",
                r.code,
                r.stderr.trim()
            ));
        } else if (r.code == 2 && r.stderr.is_empty())
            || (r.code == 1 && r.stderr.is_empty() && r.stdout.is_empty())
        {
            bad.push(format!("{args:?}: exit {} without explanation", r.code));
        }
    }
    bad
}
