use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qredist::decouple::{self, maximally_entangled, DecoupleConfig};
use qredist::linalg;
use qredist::statespec::{self, StateDocument};
use qredist::verify::{self, Suite, Tolerances, VerifyOptions};
use qredist::Error;

mod report;

/// Exit statuses, one per failure class.
mod exit {
    pub const IO: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const CAP: u8 = 3;
    pub const NOT_PURE: u8 = 4;
    pub const VIOLATION: u8 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "qredist", version, about = "Entropies and state-redistribution costs of multipartite pure states")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest total Hilbert-space dimension accepted.
    #[arg(long, global = true, default_value_t = linalg::DEFAULT_DIM_CAP, value_parser = parse_cap)]
    dim_cap: usize,

    /// Output format (default: json, or csv for `decouple`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Override a verification tolerance, e.g. `--tol cost=1e-10`
    /// (names: inequality, identity, cost).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy report, cost region, optimal corner, dual and merging costs of a `.qsv` state.
    Eval { state_file: PathBuf },

    /// Run a randomized property suite on Haar-random pure states.
    Verify {
        /// ssa | duality | composability | special-cases
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Comma-separated subsystem dimensions, e.g. 2,2,2,2.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },

    /// Random-unitary decoupling sweep over split dimensions of C.
    Decouple {
        #[arg(long)]
        dc: usize,
        #[arg(long)]
        dr: usize,
        /// Comma-separated dimensions of the sent part, each dividing --dc.
        #[arg(long, value_delimiter = ',', required = true)]
        d1: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Input on C ⊗ R: one fixed maximally entangled state, or a fresh Haar state per trial.
        #[arg(long, value_enum, default_value_t = DecoupleInput::MaxEntangled)]
        input: DecoupleInput,
    },

    /// Write a canonical `.qsv` file for a named state.
    Make {
        name: StateName,
        /// Number of qubits for cat and w.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DecoupleInput {
    Random,
    MaxEntangled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StateName {
    Cat,
    W,
    HjpwDemo,
}

fn parse_cap(s: &str) -> Result<usize, String> {
    let cap: usize = s.parse().map_err(|e| format!("{e}"))?;
    if cap < 4 {
        return Err("dimension cap must be at least 4".into());
    }
    Ok(cap)
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value.parse().map_err(|e| format!("{e}"))?;
    Tolerances::default().set(name, value)?;
    Ok((name.to_string(), value))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DimensionOverflow { .. } => exit::CAP,
            Error::NotPure(_) => exit::NOT_PURE,
            Error::NotPositiveSemidefinite(_) | Error::IncompatibleOperators(_) => exit::IO,
            _ => exit::INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(exit::IO, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    linalg::set_dim_cap(g.dim_cap);
    match &cli.command {
        Command::Eval { state_file } => {
            let text = fs::read_to_string(state_file)
                .map_err(|e| Failure::new(exit::IO, format!("cannot read {}: {e}", state_file.display())))?;
            let doc = statespec::parse_state(&text).map_err(|e| {
                Failure::new(exit::INPUT, format!("{}:{}:{}: {}", state_file.display(), e.line, e.column, e.kind))
            })?;
            let eval = report::evaluate(&doc)?;
            let body = match g.format.unwrap_or(Format::Json) {
                Format::Json => report::to_json(&eval),
                Format::Text => report::to_text(&eval),
                Format::Csv => report::to_csv(&eval),
            };
            emit(&g.out, &body)?;
            Ok(0)
        }
        Command::Verify { suite, trials, dims } => {
            let mut tolerances = Tolerances::default();
            for (name, value) in &g.tolerances {
                tolerances.set(name, *value).map_err(|e| Failure::new(exit::INPUT, e))?;
            }
            let options = VerifyOptions { trials: *trials, dims: dims.clone(), seed: g.seed, tolerances };
            let summary = verify::run_suite(*suite, &options)?;
            let body = match g.format.unwrap_or(Format::Json) {
                Format::Json => report::pretty_json(&summary),
                Format::Text => report::verify_text(&summary),
                Format::Csv => report::verify_csv(&summary),
            };
            emit(&g.out, &body)?;
            Ok(if summary.pass { 0 } else { exit::VIOLATION })
        }
        Command::Decouple { dc, dr, d1, trials, input } => {
            let config = DecoupleConfig {
                d_c: *dc,
                d_r: *dr,
                d1_values: d1.clone(),
                trials: *trials,
                master_seed: g.seed,
            };
            config.validate()?;
            let fixed = match input {
                DecoupleInput::Random => None,
                DecoupleInput::MaxEntangled => Some(maximally_entangled(*dc, *dr)?),
            };
            let rows = decouple::decouple_sweep(&config, fixed.as_ref())?;
            let body = match g.format.unwrap_or(Format::Csv) {
                Format::Csv => decouple::rows_to_csv(&rows),
                Format::Json => report::decouple_json(&rows),
                Format::Text => report::decouple_text(&rows),
            };
            emit(&g.out, &body)?;
            Ok(0)
        }
        Command::Make { name, n } => {
            let doc = match name {
                StateName::Cat => StateDocument::from_state(&statespec::make_cat(*n)?, statespec::singleton_roles(*n))?,
                StateName::W => StateDocument::from_state(&statespec::make_w(*n)?, statespec::singleton_roles(*n))?,
                StateName::HjpwDemo => {
                    let (state, partition) = statespec::make_hjpw(&statespec::hjpw_demo_spec())?;
                    StateDocument::from_state(&state, partition.labels(state.num_subsystems())?)?
                }
            };
            emit(&g.out, &statespec::format_state(&doc))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
