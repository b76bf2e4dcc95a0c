//! `pairblow`: verify blow-up formulas for stable pair invariants.
//!
//! Exit codes: 0 verified, 1 derivation disagrees with the stated formula,
//! 2 invalid input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use pairblow_core::degen::{
    verify, DegenError, DerivationTrace, OracleTable, VerifyOptions, ALL_IDS,
};
use pairblow_core::dimsolve::{check_certificate, solve_gate, GateError, GateProblem};

const ORACLE_ENV: &str = "PAIRBLOW_ORACLE";

#[derive(Parser)]
#[command(
    name = "pairblow",
    version,
    about = "Blow-up formulas for stable pair invariants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run one theorem or lemma pipeline, or all of them.
    Verify {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        theorem: Option<String>,
        #[arg(long)]
        all: bool,
        /// Range of k for the vanishing statements, `A..B` or a single value.
        #[arg(long, default_value = "1..5", value_parser = parse_k)]
        k: (i64, i64),
        /// Lower bound for c = ∫_C c1(X), overriding each statement's default.
        #[arg(long)]
        c_bound: Option<i64>,
        #[arg(long, default_value_t = 6)]
        enum_bound: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a gate problem read from a JSON file (one object or an array).
    SolveGate {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        enum_bound: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the gate problems a theorem or lemma builds, as a JSON array.
    Gates {
        #[arg(long)]
        theorem: String,
        #[arg(long, default_value = "1..5", value_parser = parse_k)]
        k: (i64, i64),
        #[arg(long)]
        c_bound: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the oracle table.
    Oracle {
        #[arg(value_enum)]
        action: OracleAction,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleAction {
    List,
    Check,
}

fn parse_k(s: &str) -> Result<(i64, i64), String> {
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((parse(a)?, parse(b)?))
        }
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

/// Failure carrying the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<DegenError> for Failure {
    fn from(e: DegenError) -> Self {
        Failure::input(e.to_string())
    }
}

fn load_oracle() -> Result<OracleTable, Failure> {
    match std::env::var_os(ORACLE_ENV) {
        Some(path) => OracleTable::from_path(Path::new(&path)).map_err(Failure::from),
        None => Ok(OracleTable::builtin()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(e.to_string())),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::input(e.to_string()))
}

fn options(k: (i64, i64), c_bound: Option<i64>, enum_bound: u32) -> VerifyOptions {
    VerifyOptions {
        k_min: k.0,
        k_max: k.1,
        c_bound,
        enum_bound,
    }
}

fn cmd_verify(
    ids: Vec<String>,
    opts: VerifyOptions,
    format: Format,
    out: Option<&Path>,
    all: bool,
) -> Result<u8, Failure> {
    let table = load_oracle()?;
    let traces: Vec<DerivationTrace> = ids
        .iter()
        .map(|id| verify(id, &opts, &table))
        .collect::<Result<_, _>>()?;
    let code = traces
        .iter()
        .map(|t| t.exit_code() as u8)
        .max()
        .unwrap_or(0);
    let text = match format {
        Format::Json if all => to_json(&traces)?,
        Format::Json => to_json(&traces[0])?,
        Format::Text => traces
            .iter()
            .map(DerivationTrace::render_text)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    emit(out, &text)?;
    Ok(code)
}

fn read_problems(file: &Path) -> Result<(Vec<GateProblem>, bool), Failure> {
    let text =
        fs::read_to_string(file).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let many = value.is_array();
    let problems = if many {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|p| vec![p])
    }
    .map_err(|e| Failure::input(format!("{}: not a gate problem: {e}", file.display())))?;
    Ok((problems, many))
}

fn cmd_solve_gate(
    file: &Path,
    enum_bound: u32,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let (problems, many) = read_problems(file)?;
    let mut certs = Vec::new();
    for p in &problems {
        match solve_gate(p, enum_bound) {
            Ok(c) => certs.push(c),
            Err(e @ GateError::DominanceFails { .. }) => {
                return Err(Failure {
                    code: 1,
                    message: format!("refused: {e}"),
                })
            }
            Err(e) => return Err(Failure::input(e.to_string())),
        }
    }
    for c in &certs {
        if let Err(e) = check_certificate(c) {
            return Err(Failure {
                code: 1,
                message: format!("certificate for {} failed its check: {e}", c.problem.label),
            });
        }
    }
    let text = match format {
        Format::Json if many => to_json(&certs)?,
        Format::Json => to_json(&certs[0])?,
        Format::Text => certs
            .iter()
            .map(|c| c.reasoning.join("\n"))
            .collect::<Vec<_>>()
            .join("\n\n"),
    };
    emit(out, &text)?;
    Ok(0)
}

fn cmd_gates(id: &str, opts: VerifyOptions, out: Option<&Path>) -> Result<u8, Failure> {
    let trace = verify(id, &opts, &OracleTable::builtin())?;
    let problems: Vec<&GateProblem> = trace
        .identities
        .iter()
        .map(|i| &i.certificate.problem)
        .collect();
    emit(out, &to_json(&problems)?)?;
    Ok(0)
}

fn cmd_oracle(action: OracleAction, format: Format) -> Result<u8, Failure> {
    let table = load_oracle()?;
    match action {
        OracleAction::List => {
            let text = match format {
                Format::Json => to_json(&table)?,
                Format::Text => table
                    .entries()
                    .iter()
                    .map(|e| {
                        let mut line =
                            format!("{} = {}\n  source: {}", e.symbol, e.value, e.provenance);
                        if let Some(n) = &e.note {
                            line.push_str(&format!("\n  note: {n}"));
                        }
                        line
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(None, &text)?;
            Ok(0)
        }
        OracleAction::Check => {
            let checks = table.cross_checks();
            let text = match format {
                Format::Json => to_json(&checks)?,
                Format::Text => checks
                    .iter()
                    .map(|c| {
                        let stored = c
                            .stored
                            .as_ref()
                            .map_or("missing".to_string(), ToString::to_string);
                        let verdict = if c.agrees() { "ok" } else { "DISAGREES" };
                        format!(
                            "{}: derived {} = {}, stored {stored}: {verdict} (secondary evidence)",
                            c.symbol, c.derivation, c.derived
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(None, &text)?;
            Ok(if checks.iter().all(|c| c.agrees()) {
                0
            } else {
                1
            })
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify {
            theorem,
            all,
            k,
            c_bound,
            enum_bound,
            format,
            out,
        } => {
            let ids = match theorem {
                Some(id) => vec![id],
                None => ALL_IDS.iter().map(|s| s.to_string()).collect(),
            };
            cmd_verify(
                ids,
                options(k, c_bound, enum_bound),
                format,
                out.as_deref(),
                all,
            )
        }
        Command::SolveGate {
            file,
            enum_bound,
            format,
            out,
        } => cmd_solve_gate(&file, enum_bound, format, out.as_deref()),
        Command::Gates {
            theorem,
            k,
            c_bound,
            out,
        } => cmd_gates(&theorem, options(k, c_bound, 6), out.as_deref()),
        Command::Oracle { action, format } => cmd_oracle(action, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("pairblow: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
