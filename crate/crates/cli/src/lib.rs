//! The `tilepump` command line.
//!
//! Exit codes: 0 when the analysis completed (whatever its outcome), 1 on a
//! usage error, 2 on an invalid instance or certificate, 3 when the compute
//! budget ran out.

pub mod server;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use tilepump_core::api::{self, ApiError, Command, RenderRequest};
use tilepump_core::certify::{parse_certificate, verify};
use tilepump_core::engine::ConcludeLimits;
use tilepump_core::instance::{parse_instance, Instance};
use tilepump_core::visibility::Side;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

/// Environment variable capping the compute time of one analysis, in milliseconds.
pub const BUDGET_ENV: &str = "TILEPUMP_BUDGET_MS";

#[derive(Debug, Parser)]
#[command(name = "tilepump", version, about = "Pumping and fragility analysis of temperature-1 tile assembly paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    East,
    West,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::East => Side::East,
            SideArg::West => Side::West,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Decide whether the path can be pumped or broken.
    Analyze {
        file: PathBuf,
        /// Analysis limits as `key=value`, e.g. `max_steps=500` or `diet={"half_width":8,"half_height":2}`.
        #[arg(long = "limits", value_name = "KEY=VALUE")]
        limits: Vec<String>,
    },
    /// Decide the pumping of the segment `P[i, j]`.
    Pump {
        file: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// List the glues visible from one side.
    Visibility {
        file: PathBuf,
        #[arg(long, value_enum)]
        side: SideArg,
    },
    /// Look for a nice U-turn.
    Uturn {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "west")]
        hand: SideArg,
    },
    /// Draw the instance as SVG.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// `analyze`, `uturn`, `rays-east`, `rays-west` or `pump:I,J`; repeatable.
        #[arg(long = "overlay")]
        overlays: Vec<String>,
    },
    /// Check a certificate against an instance.
    Verify { instance: PathBuf, certificate: PathBuf },
    /// Print every named bound for the given sizes.
    Bounds {
        #[arg(long)]
        tiles: u64,
        #[arg(long = "seed-size")]
        seed_size: u64,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = 1 << 20)]
        max_body_bytes: usize,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Failure {
        let code = match e {
            ApiError::Instance(_) => EXIT_INVALID,
            ApiError::Precondition(_) => EXIT_USAGE,
            ApiError::Budget { .. } => EXIT_BUDGET,
        };
        Failure { code, message: serde_json::to_string(&e.body()).expect("error bodies serialize") }
    }
}

pub(crate) fn min_budget(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// The budget set in the environment; unset or unparsable values mean no budget.
pub fn env_budget() -> Option<u64> {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok())
}

/// Builds limits from `key=value` pairs; values are JSON, or strings when they do not parse.
pub fn parse_limits(pairs: &[String]) -> Result<ConcludeLimits, Failure> {
    let mut map = Map::new();
    for pair in pairs {
        let (k, v) = pair.split_once('=').ok_or_else(|| Failure::usage(format!("expected KEY=VALUE, got `{pair}`")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().to_string(), value);
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| Failure::usage(format!("invalid limits: {e}")))
}

fn parse_overlay(spec: &str) -> Result<Command, Failure> {
    match spec {
        "analyze" => Ok(Command::Analyze),
        "uturn" => Ok(Command::Uturn { hand: None }),
        "rays-east" => Ok(Command::Visibility { side: Side::East }),
        "rays-west" => Ok(Command::Visibility { side: Side::West }),
        _ => {
            let parsed = spec.strip_prefix("pump:").and_then(|r| r.split_once(',')).and_then(|(i, j)| {
                Some(Command::Pump { i: i.trim().parse().ok()?, j: j.trim().parse().ok()? })
            });
            parsed.ok_or_else(|| Failure::usage(format!("unknown overlay `{spec}`")))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map(|(_, i)| i).map_err(|e| Failure::from(ApiError::Instance(e)))
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn command(file: &Path, command: Command, mut limits: ConcludeLimits) -> Result<String, Failure> {
    limits.budget_ms = min_budget(limits.budget_ms, env_budget());
    let instance = load(file)?;
    Ok(pretty(&api::run_command(&instance, &command, &limits)?))
}

/// Runs a parsed command line and returns what to print on standard output.
pub fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Cmd::Analyze { file, limits } => command(&file, Command::Analyze, parse_limits(&limits)?),
        Cmd::Pump { file, i, j } => command(&file, Command::Pump { i, j }, ConcludeLimits::default()),
        Cmd::Visibility { file, side } => command(&file, Command::Visibility { side: side.into() }, ConcludeLimits::default()),
        Cmd::Uturn { file, hand } => command(&file, Command::Uturn { hand: Some(hand.into()) }, ConcludeLimits::default()),
        Cmd::Render { file, output, overlays } => {
            let (instance, _) = parse_instance(&read(&file)?).map_err(|e| Failure::from(ApiError::Instance(e)))?;
            let with = overlays.iter().map(|s| parse_overlay(s)).collect::<Result<Vec<_>, _>>()?;
            let limits = ConcludeLimits { budget_ms: env_budget(), ..Default::default() };
            let svg = api::render(&RenderRequest { instance, overlays: Default::default(), with, limits })?;
            std::fs::write(&output, svg).map_err(|e| Failure::usage(format!("cannot write {}: {e}", output.display())))?;
            Ok(format!("wrote {}", output.display()))
        }
        Cmd::Verify { instance, certificate } => {
            let instance = load(&instance)?;
            let cert = parse_certificate(&read(&certificate)?).map_err(|e| Failure::invalid(e.to_string()))?;
            let verdict = verify(&instance.tas, &instance.path, &cert).map_err(|e| Failure::invalid(e.to_string()))?;
            Ok(pretty(&verdict))
        }
        Cmd::Bounds { tiles, seed_size } => Ok(pretty(&api::bounds(tiles, seed_size))),
        Cmd::Serve { port, max_body_bytes } => {
            let config = server::ServeConfig { max_body_bytes, budget_ms: env_budget() };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::usage(e.to_string()))?;
            runtime.block_on(server::serve(port, config)).map_err(|e| Failure::usage(format!("server failed: {e}")))?;
            Ok(String::new())
        }
    }
}

/// Parses the arguments, runs the command and maps failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match execute(cli) {
        Ok(out) => {
            if !out.is_empty() {
                let _ = writeln!(std::io::stdout().lock(), "{out}");
            }
            ExitCode::from(EXIT_OK)
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_from_pairs() {
        let l = parse_limits(&["max_steps=12".into(), r#"diet={"half_width":3,"half_height":1}"#.into()]).unwrap();
        assert_eq!(l.max_steps, 12);
        assert_eq!(l.diet.unwrap().half_width, 3);
        assert_eq!(parse_limits(&["nope".into()]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse_limits(&["max_steps=lots".into()]).unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn overlays_parse() {
        assert_eq!(parse_overlay("pump:3,4").unwrap(), Command::Pump { i: 3, j: 4 });
        assert_eq!(parse_overlay("rays-east").unwrap(), Command::Visibility { side: Side::East });
        assert!(parse_overlay("pump:3").is_err());
    }

    #[test]
    fn budgets_take_the_minimum() {
        assert_eq!(min_budget(Some(5), Some(3)), Some(3));
        assert_eq!(min_budget(None, Some(3)), Some(3));
        assert_eq!(min_budget(None, None), None);
    }
}
