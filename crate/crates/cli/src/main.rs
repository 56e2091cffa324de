//! `demifield`: generate fields, run single checks and suites.
//!
//! Exit codes: 0 when nothing was violated, 1 on any VIOLATION, 2 on any
//! execution error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use demifield::checks::{CheckConfig, CheckOutcome, Verdict, THEOREM_IDS};
use demifield::fields::{sample_field, GeneratorSpec};
use demifield::harness::{run_suite, write_suite, RunConfig};
use demifield::stats::{upcross_total, UpcrossMode};
use demifield::Error;

const WORKERS_ENV: &str = "DEMIFIELD_WORKERS";

#[derive(Parser)]
#[command(name = "demifield", version, about = "Monte-Carlo checks of maximal inequalities for multiindexed demimartingales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one field realization and write it as CSV.
    Gen {
        /// Generator JSON, or a check config with a `generator` key.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one check and write its JSON report.
    Check {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count upcrossings of one realization and print the report.
    Upcross {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite of checks, writing `suite.json` and `suite.csv`.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Deserialize)]
struct UpcrossConfig {
    generator: GeneratorSpec,
    a: f64,
    b: f64,
    #[serde(default = "corner_line")]
    mode: UpcrossMode,
    #[serde(default)]
    seed: u64,
}

fn corner_line() -> UpcrossMode {
    UpcrossMode::CornerLine
}

type CliResult<T> = std::result::Result<T, String>;

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| format!("invalid {what}: {e}"))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| e.to_string())
}

/// Sizes the global pool: `DEMIFIELD_WORKERS`, else the config, else rayon's default.
fn init_workers(from_config: Option<usize>) -> CliResult<()> {
    let env = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|n| *n > 0).ok_or(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))?),
        Err(_) => None,
    };
    if let Some(n) = env.or(from_config) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("cannot size the worker pool: {e}"))?;
    }
    Ok(())
}

fn outcome_code(outcome: &CheckOutcome) -> u8 {
    let violated = outcome.reports().iter().any(|r| r.verdict == Verdict::Violation);
    u8::from(violated)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Gen { config, out, seed } => {
            init_workers(None)?;
            let mut v = read_json(&config)?;
            let seed = seed.or_else(|| v.get("seed").and_then(Value::as_u64)).unwrap_or(0);
            if let Some(g) = v.get_mut("generator") {
                v = g.take();
            }
            let spec: GeneratorSpec = parse(v, "generator")?;
            let field = sample_field(&spec, seed).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            field.write_csv(&mut buf).map_err(|e| e.to_string())?;
            fs::write(&out, buf).map_err(|e| format!("{}: {e}", out.display()))?;
            Ok(0)
        }
        Command::Check { theorem, config, seed, replicates, out } => {
            init_workers(None)?;
            if !THEOREM_IDS.contains(&theorem.as_str()) {
                return Err(format!("unknown theorem {theorem:?}; expected one of {}", THEOREM_IDS.join(", ")));
            }
            let mut v = read_json(&config)?;
            let obj = v.as_object_mut().ok_or("check config must be a JSON object")?;
            match obj.get("theorem").and_then(Value::as_str) {
                Some(t) if t != theorem => {
                    return Err(format!("config is for theorem {t:?} but --theorem is {theorem:?}"))
                }
                _ => {
                    obj.insert("theorem".into(), Value::String(theorem));
                }
            }
            let mut cfg: CheckConfig = parse(v, "check config")?;
            if let Some(s) = seed {
                cfg.seed = Some(s);
            }
            if let Some(r) = replicates {
                cfg.replicates = Some(r);
            }
            let outcome = cfg.run(0).map_err(|e: Error| e.to_string())?;
            write_output(out.as_deref(), &to_json(&outcome)?)?;
            Ok(outcome_code(&outcome))
        }
        Command::Upcross { config, out } => {
            let cfg: UpcrossConfig = parse(read_json(&config)?, "upcross config")?;
            let field = sample_field(&cfg.generator, cfg.seed).map_err(|e| e.to_string())?;
            let report = upcross_total(&field, cfg.a, cfg.b, cfg.mode).map_err(|e| e.to_string())?;
            write_output(out.as_deref(), &to_json(&report)?)?;
            Ok(0)
        }
        Command::Suite { config, out, seed } => {
            let mut cfg: RunConfig = parse(read_json(&config)?, "suite config")?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            init_workers(cfg.workers)?;
            let report = run_suite(&cfg).map_err(|e| e.to_string())?;
            write_suite(&report, &out).map_err(|e| e.to_string())?;
            for e in &report.entries {
                let detail = e.error.as_deref().unwrap_or("");
                eprintln!("[{:>3}] {:<24} {:?} {detail}", e.index, e.theorem, e.status);
            }
            let s = &report.summary;
            eprintln!(
                "{} checks: {} hold, {} violation, {} inconclusive, {} trend, {} error",
                s.checks, s.hold, s.violation, s.inconclusive, s.trend, s.error
            );
            Ok(s.exit_code as u8)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
