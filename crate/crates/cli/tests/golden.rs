//! Golden corpus: every `tests/golden/*.args` file holds one argument per
//! line; the matching `.out` file holds the exit code, stdout and stderr of
//! the `gvf` binary. Run with `GVF_BLESS=1` to rewrite the `.out` files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn cases() -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = fs::read_dir(golden_dir())
        .unwrap()
        .filter_map(|e| {
            let path = e.unwrap().path();
            (path.extension()? == "args").then(|| {
                let name = path.file_stem().unwrap().to_string_lossy().into_owned();
                let args = fs::read_to_string(&path).unwrap().lines().map(str::to_string).collect();
                (name, args)
            })
        })
        .collect();
    out.sort();
    out
}

fn run(args: &[String]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gvf"))
        .args(args)
        .env_remove("GVF_PRECISION")
        .output()
        .expect("gvf runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn transcript(args: &[String]) -> String {
    let (code, stdout, stderr) = run(args);
    let mut s = format!("exit {code}\n--- stdout\n{stdout}");
    if !stderr.is_empty() {
        s.push_str("--- stderr\n");
        s.push_str(&stderr);
    }
    s
}

#[test]
fn corpus_matches() {
    let bless = std::env::var_os("GVF_BLESS").is_some();
    let cases = cases();
    assert!(cases.len() >= 25, "corpus has {} cases", cases.len());
    let mut failures = Vec::new();
    for (name, args) in &cases {
        let got = transcript(args);
        let path = golden_dir().join(format!("{name}.out"));
        if bless {
            fs::write(&path, &got).unwrap();
            continue;
        }
        let want = fs::read_to_string(&path).unwrap_or_default();
        if got != want {
            failures.push(format!("{name}:\n--- want\n{want}--- got\n{got}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn json_lines_validate() {
    for (name, args) in cases().iter().filter(|(_, a)| a.iter().any(|x| x == "--json")) {
        let (_, stdout, _) = run(args);
        assert!(!stdout.is_empty(), "{name}");
        for line in stdout.lines() {
            if let Err(e) = gvf_cli::schema::validate(line) {
                panic!("{name}: {e}\n{line}");
            }
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    for (name, args) in cases() {
        assert_eq!(transcript(&args), transcript(&args), "{name}");
        let mut sequential = vec!["--threads".to_string(), "1".to_string()];
        sequential.extend(args.iter().cloned());
        assert_eq!(transcript(&sequential), transcript(&args), "{name} with one thread");
    }
}

#[test]
fn in_process_runner_agrees_with_binary() {
    for (name, args) in cases().into_iter().take(6) {
        let (code, stdout, stderr) = run(&args);
        let argv = std::iter::once("gvf".to_string()).chain(args);
        let o = gvf_cli::run(argv);
        assert_eq!((o.code, o.stdout, o.stderr), (code, stdout, stderr), "{name}");
    }
}
