//! Command-line front end: `translate`, `solve`, `verify`, `stats` and `gen`.
//!
//! Exit codes are fixed by [`exit`]. Commands write their primary output to
//! `--out` when given and to stdout otherwise; diagnostics go to stderr.

pub mod gen;
pub mod stats;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecnf2mip::ecnf::{normalize_theory, validate_theory, Theory};
use ecnf2mip::io::{parse_ecnf_text, print_ecnf_text, read_mps, write_mps, write_solution, write_solution_with};
use ecnf2mip::linearize::{translate_theory, TranslateOptions};
use ecnf2mip::mip::MipModel;
use ecnf2mip::oracle::OracleError;
use ecnf2mip::par::Execution;
use ecnf2mip::solver::{branch_and_bound, Limits, SolveStatus};
use ecnf2mip::verify::{verify_theory, VerifyError, VerifyOptions};

use crate::gen::Family;

pub mod exit {
    pub const OK: i32 = 0;
    /// `solve`: infeasible. `verify`: a check failed.
    pub const FAILED: i32 = 1;
    /// Parse, validation or usage error.
    pub const INPUT: i32 = 2;
    pub const TRIVIALLY_INFEASIBLE: i32 = 3;
    pub const FILESYSTEM: i32 = 4;
    pub const LIMIT: i32 = 5;
    pub const UNBOUNDED: i32 = 6;
    pub const SPACE_TOO_LARGE: i32 = 7;
    /// The LP solver gave up (numeric breakdown or iteration limit).
    pub const SOLVER: i32 = 8;
}

#[derive(Debug, Parser)]
#[command(name = "ecnf2mip", version, about = "Compile ECNF theories to mixed-integer programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate an ECNF theory to free-format MPS.
    Translate {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve an ECNF theory or MPS model and print the solution.
    Solve {
        input: PathBuf,
        /// Input format; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Check the translation of a small theory against brute-force enumeration.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Report translation size ratios for every .ecnf file in a directory.
    Stats {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate an instance: random, tsp, nqueens-logic, nqueens-cp or knapsack.
    Gen {
        family: String,
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave out level-mapping columns and rows.
    #[arg(long)]
    pub no_level_maps: bool,
    /// Make level columns integer.
    #[arg(long)]
    pub integer_levels: bool,
}

impl Common {
    pub fn translate_options(&self) -> TranslateOptions {
        TranslateOptions { level_maps: !self.no_level_maps, integer_levels: self.integer_levels }
    }
}

#[derive(Debug, Args, Clone)]
pub struct LimitArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub max_nodes: usize,
    #[arg(long, default_value_t = 60.0)]
    pub max_seconds: f64,
}

impl LimitArgs {
    pub fn limits(&self) -> Limits {
        Limits { max_nodes: self.max_nodes, time: Some(Duration::from_secs_f64(self.max_seconds.max(0.0))) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ecnf,
    Mps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(exit::FILESYSTEM, format!("{}: {e}", path.display())))
}

/// Parses, validates and normalizes; returns the source theory and its
/// normal form.
pub fn load_theory(path: &Path) -> Result<(Theory, Theory), CliError> {
    let text = read(path)?;
    let theory = parse_ecnf_text(&text).map_err(|e| CliError::new(exit::INPUT, format!("{}:{e}", path.display())))?;
    let report = validate_theory(&theory);
    if !report.is_ok() {
        return Err(CliError::new(exit::INPUT, format!("{}: invalid theory\n{report}", path.display())));
    }
    let normalized = normalize_theory(&theory).map_err(|e| CliError::new(exit::INPUT, e.to_string()))?;
    Ok((theory, normalized))
}

pub fn translate(theory: &Theory, opts: TranslateOptions) -> Result<MipModel, CliError> {
    let model = translate_theory(theory, opts).map_err(|e| CliError::new(exit::INPUT, e.to_string()))?;
    log::info!(
        "translated `{}`: {} columns, {} rows",
        theory.name,
        model.columns.len(),
        model.rows.len()
    );
    Ok(model)
}

fn emit(out_path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out_path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::new(exit::FILESYSTEM, format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(exit::FILESYSTEM, e.to_string())),
    }
}

/// Runs one command; returns the exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Translate { input, common } => {
            let (_, theory) = load_theory(&input)?;
            let model = translate(&theory, common.translate_options())?;
            emit(common.out.as_deref(), &write_mps(&model), stdout)?;
            if model.is_trivially_infeasible() {
                let _ = writeln!(stderr, "warning: the model is trivially infeasible");
                return Ok(exit::TRIVIALLY_INFEASIBLE);
            }
            Ok(exit::OK)
        }
        Command::Solve { input, format, common, limits } => {
            let format = format.unwrap_or(if input.extension().is_some_and(|e| e == "mps") {
                Format::Mps
            } else {
                Format::Ecnf
            });
            // Atoms introduced by normalization are not reported.
            let (model, source) = match format {
                Format::Ecnf => {
                    let (source, normalized) = load_theory(&input)?;
                    (translate(&normalized, common.translate_options())?, Some(source))
                }
                Format::Mps => {
                    let m = read_mps(&read(&input)?)
                        .map_err(|e| CliError::new(exit::INPUT, format!("{}: {e}", input.display())))?;
                    (m, None)
                }
            };
            let result = branch_and_bound(&model, &limits.limits())
                .map_err(|e| CliError::new(exit::SOLVER, e.to_string()))?;
            log::info!("{} nodes, {} LP iterations", result.nodes, result.lp_iterations);
            let text = match &source {
                Some(t) => {
                    let names = t.symbols();
                    write_solution_with(&model, &result, |c| names.contains_key(c.name.as_str()))
                }
                None => write_solution(&model, &result),
            };
            emit(common.out.as_deref(), &text, stdout)?;
            Ok(match result.status {
                SolveStatus::Optimal => exit::OK,
                SolveStatus::Infeasible => exit::FAILED,
                SolveStatus::Limit => exit::LIMIT,
                SolveStatus::Unbounded => exit::UNBOUNDED,
            })
        }
        Command::Verify { input, common, limits } => {
            let (theory, _) = load_theory(&input)?;
            let opts = VerifyOptions {
                translate: common.translate_options(),
                limits: limits.limits(),
                ..VerifyOptions::default()
            };
            let report = match verify_theory(&theory, &opts) {
                Ok(r) => r,
                Err(VerifyError::Oracle(e @ OracleError::SpaceTooLarge(_))) => {
                    return Err(CliError::new(exit::SPACE_TOO_LARGE, e.to_string()))
                }
                Err(VerifyError::Solver(e)) => return Err(CliError::new(exit::SOLVER, e.to_string())),
                Err(e) => return Err(CliError::new(exit::INPUT, e.to_string())),
            };
            let oracle = report.oracle_optimum.map_or_else(|| "unsat".to_string(), |v| v.to_string());
            let text = format!(
                "{report}\noracle {oracle} ({} models)\nmip {}\n",
                report.models,
                report.mip_objective.map_or_else(|| "none".to_string(), ecnf2mip::io::format_number)
            );
            emit(common.out.as_deref(), &text, stdout)?;
            Ok(if report.all_passed() { exit::OK } else { exit::FAILED })
        }
        Command::Stats { dir, common } => {
            let report = stats::collect_stats(&dir, common.translate_options(), Execution::default())
                .map_err(|e| CliError::new(exit::FILESYSTEM, format!("{}: {e}", dir.display())))?;
            emit(common.out.as_deref(), &format!("{report}\n"), stdout)?;
            Ok(if report.rows.is_empty() { exit::INPUT } else { exit::OK })
        }
        Command::Gen { family, size, seed, out } => {
            let family: Family = family.parse().map_err(|e: String| CliError::new(exit::INPUT, e))?;
            let theory = gen::generate(family, size, seed).map_err(|e| CliError::new(exit::INPUT, e.to_string()))?;
            emit(out.as_deref(), &print_ecnf_text(&theory), stdout)?;
            Ok(exit::OK)
        }
    }
}

/// Maps `ECNF2MIP_LOG` (`quiet`, `info`, `debug`) to a log level; unset or
/// unknown values are quiet.
pub fn log_level(value: Option<&str>) -> log::LevelFilter {
    match value {
        Some("info") => log::LevelFilter::Info,
        Some("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Off,
    }
}

pub fn stdio_run(cli: Cli) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(cli, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}
