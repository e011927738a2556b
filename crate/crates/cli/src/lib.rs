//! The `gvf` command line: argument model, dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 a checked property or verdict failed, 2 bad
//! input, 3 precision exhausted. With `--json` every line written to stdout
//! is a JSON document carrying a `schema` tag (see [`schema`]).

mod commands;
pub mod schema;

use clap::{Parser, Subcommand};
use gvf_core::Error;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "gvf", version, about = "Places, heights and globally valued field checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Field descriptor, e.g. '{"type":"quadratic","d":2}'.
    #[arg(long, global = true, default_value = r#"{"type":"Q"}"#)]
    pub field: String,
    /// Emit JSON documents instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Working precision in bits.
    #[arg(long, global = true, env = "GVF_PRECISION")]
    pub precision: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// R_t(a_1, ..., a_n) for a tropical term t.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        args: String,
    },
    /// The height of one element.
    Height {
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Support places of a tuple with their weights and valuations.
    Places {
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Check one globally valued field axiom.
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// Lattice divisors given as {"generators": [...], "term": "..."}.
    Divisor {
        #[command(subcommand)]
        op: DivisorCommand,
    },
    /// Height of a point under a template {"functions": [...], "term": "..."}.
    PointHeight {
        #[arg(long, allow_hyphen_values = true)]
        template: String,
        /// The point: a JSON object or `y=2,z=1/3`.
        #[arg(long, allow_hyphen_values = true)]
        args: String,
    },
    /// Feasibility of prescribed functional values.
    Feasible {
        /// Instance document, inline JSON or a file path.
        #[arg(long, allow_hyphen_values = true)]
        instance: String,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
    },
    /// Minimize a functional over the feasibility polytope.
    Minimize {
        #[arg(long, allow_hyphen_values = true)]
        instance: String,
        /// Objective term; defaults to the instance's "objective".
        #[arg(long, allow_hyphen_values = true)]
        expr: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
    },
    /// Search for points whose heights approximate targets.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        instance: String,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        /// Rational candidate bound, replacing the instance's.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        mode: Option<String>,
        /// Also print the wall time (table output only).
        #[arg(long)]
        timing: bool,
    },
    /// Running-minimum estimate of the essential infimum of a height.
    Zeta {
        #[arg(long, required_unless_present = "template")]
        instance: Option<String>,
        /// Template; candidates are then the rationals up to --bound.
        #[arg(long, conflicts_with = "instance")]
        template: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// The product formula for one element.
    Product {
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Additivity and homogeneity of t -> R_t on a tuple.
    Linearity {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        expr2: String,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        args: String,
    },
    /// Local-global positivity for a term on a tuple.
    Positivity {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        args: String,
    },
    /// R_t(a) = R_t(conjugate of a) over a quadratic field.
    Galois {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        args: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum DivisorCommand {
    /// Value of the standard functional.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    /// Effectivity on the support places.
    Effective {
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    /// D_1 ∧ D_2 ∧ ... with re-indexed generators.
    Wedge {
        #[arg(long, required = true, allow_hyphen_values = true)]
        divisor: Vec<String>,
    },
}

/// What a command produced: stdout lines and whether its verdict holds.
pub struct Report {
    pub lines: Vec<String>,
    pub ok: bool,
}

/// The result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_precision() {
        EXIT_PRECISION
    } else if matches!(e, Error::Unbounded | Error::NoCandidateSatisfiesEquations) {
        EXIT_VERDICT
    } else {
        EXIT_INPUT
    }
}

fn error_doc(kind: &str, message: &str, code: i32) -> Value {
    json!({"schema": "gvf.error/1", "error": {"kind": kind, "message": message, "exit_code": code}})
}

fn failure(json_mode: bool, kind: &str, message: &str, code: i32) -> Outcome {
    if json_mode {
        Outcome { code, stdout: format!("{}\n", error_doc(kind, message, code)), stderr: String::new() }
    } else {
        Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Run one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json_mode = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: String::new() };
            }
            if json_mode {
                let msg = e.render().to_string();
                let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
                return failure(true, "UsageError", first, EXIT_INPUT);
            }
            return Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: e.render().to_string() };
        }
    };
    match commands::dispatch(&cli) {
        Ok(report) => {
            let mut stdout = report.lines.join("\n");
            stdout.push('\n');
            Outcome { code: if report.ok { EXIT_OK } else { EXIT_VERDICT }, stdout, stderr: String::new() }
        }
        Err(e) => failure(cli.json, e.kind(), &e.to_string(), exit_code(&e)),
    }
}
