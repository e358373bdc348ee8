//! Subcommands and their dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use multinorm_core::catalog::{self, Example};
use multinorm_core::report::Method;
use multinorm_core::{kummer, selftest, validate_and_normalize};
use serde::Serialize;

use crate::config::{ConfigFile, Part};
use crate::report::{self, FieldTable, Job, ReportDocument, RunOptions};
use crate::{exit, CliError};

#[derive(Parser, Debug)]
#[command(name = "multinorm", version, about = "Tate-Shafarevich groups of multinorm-one tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Formula,
    Oracle,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Formula => Method::Formula,
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct ComputeArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodArg,
    /// Maximum number of residue vectors the oracle may classify.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Write the report as JSON to this path (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub debug_monotonicity: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a configuration file and print its derived constants.
    Validate { file: PathBuf },
    /// Compute Sha and Sha_omega for a configuration file.
    Compute {
        file: PathBuf,
        #[command(flatten)]
        args: ComputeArgs,
    },
    /// Run a built-in example (or `all`).
    Examples {
        name: String,
        #[command(flatten)]
        args: ComputeArgs,
    },
    /// Build a quartic Kummer configuration over Q(i).
    Kummer {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        radicands: Vec<i64>,
        /// Also compute Sha and Sha_omega.
        #[arg(long)]
        compute: bool,
        #[command(flatten)]
        args: ComputeArgs,
    },
    /// Cross-check both routes on random configurations.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    if path == Path::new("-") {
        println!("{text}");
        return Ok(());
    }
    std::fs::write(path, text + "\n").map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(json: &Option<PathBuf>, value: &T, human: impl FnOnce() -> String) -> Result<(), CliError> {
    if json.as_deref() != Some(Path::new("-")) {
        print!("{}", human());
    }
    match json {
        Some(p) => write_json(p, value),
        None => Ok(()),
    }
}

/// Runs the jobs and reports a disagreement after the output is written.
fn compute(
    jobs: &[Job],
    args: &ComputeArgs,
    default_budget: Option<u128>,
    debug: bool,
    dump: impl FnOnce() -> String,
) -> Result<ReportDocument, CliError> {
    let opts = RunOptions {
        method: args.method.into(),
        budget: args.budget.or(default_budget),
        debug_monotonicity: args.debug_monotonicity || debug,
    };
    let doc = report::run(jobs, opts)?;
    emit(&args.json, &doc, || report::render(&doc))?;
    if doc.agreement == Some(false) {
        let _ = std::io::stdout().flush();
        eprintln!("configuration:\n{}", dump());
        return Err(CliError::Disagreement("oracle and formula disagree".into()));
    }
    Ok(doc)
}

fn jobs_of_parts(parts: &[Part]) -> Vec<Job<'_>> {
    parts
        .iter()
        .map(|p| Job {
            label: p.label.clone(),
            config: &p.config,
            local: &p.local,
        })
        .collect()
}

fn jobs_of_example(ex: &Example) -> Vec<Job<'_>> {
    ex.parts
        .iter()
        .map(|p| Job {
            label: p.label.clone(),
            config: &p.config,
            local: &p.local,
        })
        .collect()
}

fn validate(file: &Path) -> Result<(), CliError> {
    let parts = ConfigFile::load(file)?.parts()?;
    let mut out = String::new();
    for part in &parts {
        let cfg = validate_and_normalize(&part.config)?;
        out.push_str(&format!("[{}]\n", part.label));
        report::render_fields(&mut out, &FieldTable::new(&cfg, &part.config, &part.local));
    }
    println!("{out}ok");
    Ok(())
}

fn compute_file(file: &Path, args: &ComputeArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::Validation(format!("{}: {e}", file.display())))?;
    let parts = ConfigFile::parse(&text)?.parts()?;
    let budget = parts.iter().filter_map(|p| p.budget).min();
    let debug = parts.iter().any(|p| p.debug_monotonicity);
    compute(&jobs_of_parts(&parts), args, budget, debug, || text.clone()).map(|_| ())
}

fn examples(name: &str, args: &ComputeArgs) -> Result<(), CliError> {
    let list = if name == "all" {
        catalog::all()?
    } else {
        vec![catalog::example(name)?]
    };
    if let (true, Some(json)) = (name == "all", &args.json) {
        // One document per example, keyed by name.
        let mut docs = serde_json::Map::new();
        for ex in &list {
            let opts = RunOptions {
                method: args.method.into(),
                budget: args.budget,
                debug_monotonicity: args.debug_monotonicity,
            };
            let doc = report::run(&jobs_of_example(ex), opts)?;
            if json.as_path() != Path::new("-") {
                print!("== {}: {}\n{}", ex.name, ex.description, report::render(&doc));
            }
            let agree = doc.agreement;
            docs.insert(
                ex.name.clone(),
                serde_json::to_value(&doc).map_err(|e| CliError::Internal(e.to_string()))?,
            );
            if agree == Some(false) {
                write_json(json, &docs)?;
                eprintln!("configuration: example {}", ex.name);
                return Err(CliError::Disagreement(format!(
                    "oracle and formula disagree on {}",
                    ex.name
                )));
            }
        }
        return write_json(json, &docs);
    }
    for ex in &list {
        if args.json.as_deref() != Some(Path::new("-")) {
            println!("== {}: {}", ex.name, ex.description);
        }
        compute(&jobs_of_example(ex), args, None, false, || {
            format!("example {}", ex.name)
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct KummerSummary<'a> {
    radicands: &'a [i64],
    generators: &'a [u64],
    exponents: &'a [Vec<i64>],
    fields: FieldTable,
}

fn kummer_command(radicands: &[i64], do_compute: bool, args: &ComputeArgs) -> Result<(), CliError> {
    let b = kummer::build(radicands)?;
    if do_compute {
        let jobs = [Job {
            label: "p=2".into(),
            config: &b.config,
            local: &b.local,
        }];
        return compute(&jobs, args, None, false, || format!("kummer radicands {radicands:?}")).map(|_| ());
    }
    let cfg = validate_and_normalize(&b.config)?;
    let summary = KummerSummary {
        radicands: &b.radicands,
        generators: &b.generators,
        exponents: &b.exponents,
        fields: FieldTable::new(&cfg, &b.config, &b.local),
    };
    emit(&args.json, &summary, || {
        let mut out = format!("prime generators {:?}\n", b.generators);
        for (r, e) in b.radicands.iter().zip(&b.exponents) {
            out.push_str(&format!("  {r}: exponents mod 4 {e:?}\n"));
        }
        report::render_fields(&mut out, &summary.fields);
        out
    })
}

fn selftest_command(seed: u64, count: usize, json: &Option<PathBuf>) -> Result<(), CliError> {
    let s = selftest::run(seed, count);
    emit(json, &s, || {
        let mut out = format!("seed {seed}: {}/{} agree\n", s.agreements, s.count);
        for (kind, list) in [
            ("disagreement", &s.disagreements),
            ("violation", &s.violations),
            ("error", &s.errors),
        ] {
            for f in list {
                out.push_str(&format!(
                    "  {kind} in case {}: {}\n    {}\n",
                    f.case, f.reason, f.description
                ));
            }
        }
        out
    })?;
    if !s.disagreements.is_empty() {
        for f in &s.disagreements {
            eprintln!("configuration (case {}): {}", f.case, f.description);
        }
        return Err(CliError::Disagreement(format!(
            "{} disagreements",
            s.disagreements.len()
        )));
    }
    if !s.all_good() {
        return Err(CliError::Internal(format!(
            "{} violations, {} errors",
            s.violations.len(),
            s.errors.len()
        )));
    }
    Ok(())
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Compute { file, args } => compute_file(&file, &args),
        Command::Examples { name, args } => examples(&name, &args),
        Command::Kummer {
            radicands,
            compute,
            args,
        } => kummer_command(&radicands, compute, &args),
        Command::Selftest { seed, count, json } => selftest_command(seed, count, &json),
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::INVALID } else { exit::OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
