use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use grunsky_cert::catalog;
use grunsky_cert::grunsky::{self, Scenario};
use grunsky_cert::report::grid_csv;
use grunsky_cert::suite;
use grunsky_cert::{Error, OptimizerConfig, Status};

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_REJECTION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "grunsky-cert",
    version,
    about = "Certified enclosures of coefficient bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify one bound by id.
    Verify {
        id: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        max_boxes: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Worker threads; 0 uses the global pool.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Certify every bound and run the cross-checks.
    VerifyAll {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Sample the feasibility region of a scenario.
    Sample {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check the coefficient identities on random windows.
    Identities {
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write objective values on a uniform grid as CSV.
    Grid {
        id: String,
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn render<T: Serialize>(value: &T, json: bool, text: impl FnOnce(&T) -> String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(value).expect("report serializes");
        s.push('\n');
        s
    } else {
        text(value)
    }
}

fn emit(body: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::UnknownBound(_) | Error::InvalidConfig(_) | Error::Precondition(_) => EXIT_USAGE,
        Error::RejectionBudget { .. } => EXIT_REJECTION,
        _ => EXIT_FAIL,
    }
}

fn run(cmd: Command) -> Result<u8, (u8, String)> {
    let fail = |e: Error| (error_code(&e), e.to_string());
    let io = |m: String| (EXIT_FAIL, m);
    match cmd {
        Command::Verify {
            id,
            tol,
            max_boxes,
            out,
            json,
            workers,
        } => {
            let mut cfg = OptimizerConfig {
                workers,
                ..OptimizerConfig::with_tolerance(tol)
            };
            if let Some(m) = max_boxes {
                cfg.max_boxes = m;
            }
            let r = suite::verify_by_id(&id, &cfg).map_err(fail)?;
            emit(&render(&r, json, |r| r.to_text()), out.as_ref()).map_err(io)?;
            Ok(if r.status == Status::BudgetExhausted {
                EXIT_BUDGET
            } else if r.passed() {
                0
            } else {
                EXIT_FAIL
            })
        }
        Command::VerifyAll { out, json, workers } => {
            let r = suite::verify_all(workers).map_err(fail)?;
            emit(&render(&r, json, |r| r.to_text()), out.as_ref()).map_err(io)?;
            Ok(if r.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Sample {
            scenario,
            n,
            seed,
            out,
            json,
        } => {
            let s = Scenario::from_tag(&scenario).ok_or_else(|| {
                let tags: Vec<_> = Scenario::ALL.iter().map(Scenario::tag).collect();
                (
                    EXIT_USAGE,
                    format!(
                        "unknown scenario '{scenario}', expected one of {}",
                        tags.join(", ")
                    ),
                )
            })?;
            let r = grunsky::sample(s, n, seed).map_err(fail)?;
            emit(&render(&r, json, |r| r.to_text()), out.as_ref()).map_err(io)?;
            Ok(if r.violations() == 0 { 0 } else { EXIT_FAIL })
        }
        Command::Identities { n, seed, out, json } => {
            let r = suite::run_identities(n, seed).map_err(fail)?;
            emit(&render(&r, json, |r| r.to_text()), out.as_ref()).map_err(io)?;
            Ok(if r.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Grid {
            id,
            resolution,
            out,
        } => {
            let p = catalog::lookup(&id).map_err(fail)?;
            let rows = suite::grid_rows(&p, resolution).map_err(fail)?;
            emit(&grid_csv(&p.id, p.arity, &rows), out.as_ref()).map_err(io)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
