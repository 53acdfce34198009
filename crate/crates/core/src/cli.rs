//! Command-line front end of `bvfrob`.
//!
//! Exit codes: 0 when every check passes (for `corpus`, when every instance
//! meets its declared expectation), 1 when a mathematical check fails, 2 on
//! input errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::models::{corpus, description};
use crate::pipeline::{self, Overrides, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bvfrob", version, about = "Formal Frobenius manifolds from cyclic BV algebras, in exact arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Highest τ-order N
    #[arg(long, global = true)]
    pub tau_order: Option<usize>,
    /// Highest ħ-order M
    #[arg(long, global = true)]
    pub hbar_order: Option<usize>,
    /// Highest k for transferred operators and the closedness check
    #[arg(long = "kmax", global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Replace the instance's inner product by a seeded random one
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Algebra axioms and BV relations
    Validate(Input),
    /// Harmonic cohomology basis
    Cohomology(Input),
    /// Special deformation retract
    Retract(Input),
    /// Transferred operators, closedness and the splitting operator
    Degeneration(Input),
    /// Cyclic structure and the pairing on cohomology
    Cyclic(Input),
    /// h-compatibility and the good basis
    Goodbasis(Input),
    /// Quantum master equation
    Qme(Input),
    /// Flat coordinates, structure constants and potential
    Frobenius(Input),
    /// Every gate
    Pipeline(Input),
    /// Run every instance in a directory, in parallel
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
pub struct Input {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    /// Directory of instance files (default: the bundled corpus)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Regenerate the builtin corpus into the directory before running
    #[arg(long)]
    pub write: bool,
}

impl Opts {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            tau_order: self.tau_order,
            hbar_order: self.hbar_order,
            k_max: self.k_max,
            seed: self.seed,
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Cohomology(_) => "cohomology",
            Command::Retract(_) => "retract",
            Command::Degeneration(_) => "degeneration",
            Command::Cyclic(_) => "cyclic",
            Command::Goodbasis(_) => "goodbasis",
            Command::Qme(_) => "qme",
            Command::Frobenius(_) => "frobenius",
            Command::Pipeline(_) => "pipeline",
            Command::Corpus(_) => "corpus",
        }
    }
}

/// Output text and exit code of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn input_error(e: impl std::fmt::Display) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: EXIT_INPUT,
    }
}

fn render(report: &Report, f: Format) -> String {
    match f {
        Format::Json => report.to_json(),
        Format::Markdown => report.to_markdown(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub file: String,
    pub instance: String,
    pub expected: String,
    pub first_failure: Option<String>,
    pub meets_expectation: bool,
    pub gates: Vec<(String, pipeline::Status)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub tool: String,
    pub command: String,
    pub parameters_note: String,
    pub entries: Vec<CorpusEntry>,
    pub passed: bool,
}

impl CorpusReport {
    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "# corpus report\n\nVerdict: **{}**\n\n{}\n\n| file | expected | first failure | ok |\n|---|---|---|---|\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.parameters_note
        );
        for e in &self.entries {
            s.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                e.file,
                e.expected,
                e.first_failure.as_deref().unwrap_or("-"),
                if e.meets_expectation { "yes" } else { "NO" }
            ));
        }
        s
    }
}

/// Runs every instance under `dir` in parallel; results keep file order.
pub fn run_corpus(dir: &Path, o: &Overrides) -> Result<CorpusReport> {
    let instances = corpus::load_dir(dir)?;
    let entries: Vec<CorpusEntry> = instances
        .par_iter()
        .map(|(path, inst)| {
            let rep = pipeline::run(inst, "pipeline", o);
            let expected = match &inst.description.expect {
                None => "pass".to_string(),
                Some(e) if e.checks.is_empty() => format!("fail at {}", e.fails_at),
                Some(e) => format!("fail at {} ({})", e.fails_at, e.checks.join(", ")),
            };
            CorpusEntry {
                file: path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                instance: inst.description.name.clone(),
                expected,
                meets_expectation: pipeline::meets_expectation(inst, &rep),
                first_failure: rep.first_failure.clone(),
                gates: rep.gates.iter().map(|g| (g.name.clone(), g.status)).collect(),
            }
        })
        .collect();
    Ok(CorpusReport {
        tool: "bvfrob".into(),
        command: "corpus".into(),
        parameters_note: {
            let flag = |name: &str, v: Option<String>| v.map(|v| format!(" {name}={v}")).unwrap_or_default();
            let flags = [
                flag("tau_order", o.tau_order.map(|v| v.to_string())),
                flag("hbar_order", o.hbar_order.map(|v| v.to_string())),
                flag("k_max", o.k_max.map(|v| v.to_string())),
                flag("seed", o.seed.map(|v| v.to_string())),
            ]
            .concat();
            if flags.is_empty() {
                "truncation per file, no flag overrides".to_string()
            } else {
                format!("truncation per file, overridden by flags:{flags}")
            }
        },
        passed: entries.iter().all(|e| e.meets_expectation),
        entries,
    })
}

pub fn execute(cli: &Cli) -> Outcome {
    let o = cli.opts.overrides();
    let fmt = cli.opts.format;
    let input = match &cli.command {
        Command::Corpus(c) => {
            let dir = c.input.clone().unwrap_or_else(corpus::default_dir);
            if c.write {
                if let Err(e) = corpus::write(&dir) {
                    return input_error(e);
                }
            }
            let rep = match run_corpus(&dir, &o) {
                Ok(r) => r,
                Err(e) => return input_error(e),
            };
            let stdout = match fmt {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&rep).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Markdown => rep.to_markdown(),
            };
            return Outcome {
                stdout,
                stderr: String::new(),
                code: if rep.passed { EXIT_PASS } else { EXIT_FAIL },
            };
        }
        Command::Validate(i)
        | Command::Cohomology(i)
        | Command::Retract(i)
        | Command::Degeneration(i)
        | Command::Cyclic(i)
        | Command::Goodbasis(i)
        | Command::Qme(i)
        | Command::Frobenius(i)
        | Command::Pipeline(i) => &i.input,
    };
    let inst = match description::load_path(input) {
        Ok(i) => i,
        Err(e) => return input_error(format!("{}: {e}", input.display())),
    };
    let report = pipeline::run(&inst, cli.command.name(), &o);
    Outcome {
        stdout: render(&report, fmt),
        stderr: String::new(),
        code: if report.passed { EXIT_PASS } else { EXIT_FAIL },
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            } else {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            }
        }
    }
}
