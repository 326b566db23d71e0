use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use dqhkr::cohomology::{ModuleKind, Truncation, DEFAULT_BUDGET};
use dqhkr::report::Report;
use dqhkr::{suite, Error};

/// Runs exact verification suites for star products, module deformations
/// and truncated Hochschild cohomology.
#[derive(Parser)]
#[command(name = "dqhkr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Associativity, unit and Poisson identities of a constant-coefficient star product
    Assoc(Run<AssocParams>),
    /// Closedness of the module and equivalence obstructions
    Obstruction(Run<ObstructionParams>),
    /// sP-bracket identities, curvature and the twisted control
    SpCheck(Run<SpParams>),
    /// Build, verify and modify bimodule deformations
    Bimodule(Run<BimoduleParams>),
    /// Lifted star products contain the base algebra
    Subalgebra(Run<SubalgebraParams>),
    /// Bar and Koszul complex identities
    Chainmaps(Run<ChainParams>),
    /// Cocycle, inverse and antisymmetrization checks for the HKR maps
    Classes(Run<ClassesParams>),
    /// Truncated cohomology against the closed-form dimension count
    Hkr(Run<HkrParams>),
}

#[derive(Args)]
struct Run<P: Args> {
    #[command(flatten)]
    params: P,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON object whose keys override the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct AssocParams {
    /// Constant matrix, rows separated by `;`
    #[arg(long = "A", default_value = "0 1; 0 0")]
    #[serde(rename = "A")]
    a: String,
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct ObstructionParams {
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Number of seeded module structures
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct SpParams {
    /// Number of seeded flat lifts
    #[arg(long, default_value_t = 4)]
    configs: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct BimoduleParams {
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = 3)]
    configs: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct SubalgebraParams {
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = 2)]
    configs: usize,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct ChainParams {
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Highest chain degree checked
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct ClassesParams {
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize)]
struct HkrParams {
    /// Base dimension
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Rank of the projection
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Total dimension
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Coefficient degree bound
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Vertical operator order bound
    #[arg(long, default_value_t = 1)]
    o: u32,
    /// `functions` or `diffop`
    #[arg(long, default_value = "diffop")]
    module: String,
    /// Largest cochain basis to attempt
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

const MAX_ORDER: usize = 4;
const MAX_SAMPLES: usize = 10_000;

enum Failure {
    Usage(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Budget { .. } => Failure::Usage(e.to_string()),
            e => Failure::Other(e.into()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn check_range(name: &str, v: usize, lo: usize, hi: usize) -> Result<(), Failure> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be between {lo} and {hi}, got {v}")))
    }
}

/// Applies `--config` on top of the parsed flags; unknown keys are rejected.
fn overlay<P: Serialize + DeserializeOwned>(params: P, config: Option<&Path>) -> Result<P, Failure> {
    let Some(path) = config else { return Ok(params) };
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))?;
    let Value::Object(over) = serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))? else {
        return Err(usage(format!("config {} must be a JSON object", path.display())));
    };
    let Value::Object(mut base) = serde_json::to_value(&params).expect("params serialize") else {
        unreachable!("params are structs")
    };
    for (key, v) in over {
        if !base.contains_key(&key) {
            let known: Vec<&str> = base.keys().map(String::as_str).collect();
            return Err(usage(format!("unknown config key `{key}` (expected one of {})", known.join(", "))));
        }
        base.insert(key, v);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

fn run(command: Command) -> Result<(Report, Option<PathBuf>), Failure> {
    macro_rules! load {
        ($run:expr) => {{
            let r = $run;
            (overlay(r.params, r.config.as_deref())?, r.out)
        }};
    }
    let (report, out) = match command {
        Command::Assoc(r) => {
            let (p, out) = load!(r);
            check_range("order", p.order, 0, 6)?;
            check_range("samples", p.samples, 1, MAX_SAMPLES)?;
            let a = suite::parse_matrix(&p.a)?;
            (suite::assoc(&a, p.order, p.samples, p.seed)?, out)
        }
        Command::Obstruction(r) => {
            let (p, out) = load!(r);
            check_range("order", p.order, 1, MAX_ORDER)?;
            check_range("samples", p.samples, 1, 1000)?;
            (suite::obstruction(p.order, p.samples, p.seed)?, out)
        }
        Command::SpCheck(r) => {
            let (p, out) = load!(r);
            check_range("configs", p.configs, 1, 1000)?;
            check_range("samples", p.samples, 1, MAX_SAMPLES)?;
            (suite::sp_check(p.configs, p.samples, p.seed)?, out)
        }
        Command::Bimodule(r) => {
            let (p, out) = load!(r);
            check_range("order", p.order, 1, MAX_ORDER)?;
            check_range("configs", p.configs, 1, 1000)?;
            check_range("samples", p.samples, 1, MAX_SAMPLES)?;
            (suite::bimodule(p.order, p.configs, p.samples, p.seed)?, out)
        }
        Command::Subalgebra(r) => {
            let (p, out) = load!(r);
            check_range("order", p.order, 0, MAX_ORDER)?;
            check_range("configs", p.configs, 1, 1000)?;
            check_range("samples", p.samples, 1, MAX_SAMPLES)?;
            (suite::subalgebra(p.order, p.configs, p.samples, p.seed)?, out)
        }
        Command::Chainmaps(r) => {
            let (p, out) = load!(r);
            check_range("m", p.m, 1, 4)?;
            check_range("degree", p.degree, 0, 4)?;
            check_range("samples", p.samples, 1, MAX_SAMPLES)?;
            (suite::chainmaps(p.m, p.degree, p.samples, p.seed)?, out)
        }
        Command::Classes(r) => {
            let (p, out) = load!(r);
            check_range("samples", p.samples, 1, MAX_SAMPLES)?;
            (suite::classes(p.samples, p.seed)?, out)
        }
        Command::Hkr(r) => {
            let (p, out) = load!(r);
            let module: ModuleKind = p.module.parse().map_err(|e: Error| usage(e.to_string()))?;
            let t = Truncation { m: p.m, k: p.k, n: p.n, d: p.d, o: p.o, module };
            t.validate()?;
            (suite::hkr(&t, p.budget, p.seed)?, out)
        }
    };
    Ok((report, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match run(cli.command) {
        Ok(x) => x,
        Err(Failure::Usage(msg)) => Cli::command().error(ErrorKind::InvalidValue, msg).exit(),
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    println!("{report}");
    if let Some(path) = out {
        let written = fs::write(&path, report.to_json() + "\n").with_context(|| format!("writing {}", path.display()));
        if let Err(e) = written {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(c) => {
            eprintln!("first failure: {}: {}", c.name, c.witness.as_deref().unwrap_or("no witness"));
            ExitCode::FAILURE
        }
    }
}
