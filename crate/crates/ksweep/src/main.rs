use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ksweep::commands::{self, parse_budget, WitnessOptions};
use ksweep::formats::{load_map, load_state, stable_subspace_file, BipartiteFile, MapFile};
use ksweep::{CliError, CliResult, Report, Settings};
use ksweep_core::positivity::ProbeBudget;
use ksweep_core::suites::Suite;

/// Stable subspaces, positivity checks and entanglement witnesses for
/// bistochastic maps on matrix algebras.
#[derive(Parser)]
#[command(name = "ksweep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative numerical tolerance.
    #[arg(long, global = true, default_value_t = ksweep_core::DEFAULT_TOL)]
    tol: f64,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Positivity probe effort: quick, default or <grid>,<restarts>,<steps>.
    #[arg(long, global = true, default_value = "default", value_parser = parse_budget)]
    budget: ProbeBudget,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the positivity, decomposition and witness checks on a map.
    Analyze {
        /// Zoo name (two-block, choi, transpose, ...) or map JSON file.
        map: String,
    },
    /// Emit the Choi witness of a map, optionally evaluating or constructing a state.
    Witness {
        map: String,
        /// State to evaluate: ppt-entangled, maximally-mixed or a state JSON file.
        #[arg(long)]
        state: Option<String>,
        /// Build a state detected by the witness.
        #[arg(long)]
        construct: bool,
        /// Weight of the negative eigenvector in the constructed state.
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Background state mixed into the constructed state.
        #[arg(long, default_value = "maximally-mixed")]
        rho0: String,
    },
    /// Reproduce the reference values for the two-block map; exits 1 if any differ.
    Demo {
        /// Replace the built-in PPT entangled state by this state JSON file.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Run a seeded property suite over random maps.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write a map, state or stable subspace as JSON.
    Export {
        #[command(subcommand)]
        what: Export,
    },
}

#[derive(Subcommand)]
enum Export {
    /// A map in basis-image or Choi form.
    Map {
        map: String,
        #[arg(long, value_enum, default_value_t = MapKind::BasisImages)]
        kind: MapKind,
    },
    /// A named state.
    State { state: String },
    /// The stable subspace of a map.
    Stable { map: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    BasisImages,
    Choi,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: ksweep_core::Error| e.to_string())
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report<R: Report>(report: &R, cli: &Cli) -> CliResult<()> {
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(&text, cli.out.as_ref())?;
    match report.failure() {
        Some(reason) => Err(CliError::Assertion(reason)),
        None => Ok(()),
    }
}

fn emit_json<T: serde::Serialize>(value: &T, cli: &Cli) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::numerical)?;
    text.push('\n');
    emit(&text, cli.out.as_ref())
}

fn run(cli: &Cli) -> CliResult<()> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    let settings = Settings { tol: cli.tol, seed: cli.seed, budget: cli.budget };
    match &cli.command {
        Command::Analyze { map } => emit_report(&commands::analyze(map, &settings)?, cli),
        Command::Witness { map, state, construct, lambda, rho0 } => {
            let opts = WitnessOptions { state: state.clone(), construct: *construct, lambda: *lambda, rho0: rho0.clone() };
            emit_report(&commands::witness(map, &opts, cli.tol)?, cli)
        }
        Command::Demo { state } => {
            let state = state.as_ref().map(|p| p.to_string_lossy().into_owned());
            emit_report(&commands::demo(&settings, state.as_deref())?, cli)
        }
        Command::Verify { suite, trials, jobs } => {
            emit_report(&commands::verify(*suite, *trials, *jobs, &settings), cli)
        }
        Command::Export { what } => match what {
            Export::Map { map, kind } => {
                let s = load_map(map, cli.tol)?;
                let file = match kind {
                    MapKind::BasisImages => MapFile::basis_images(&s),
                    MapKind::Choi => MapFile::choi(&s),
                };
                emit_json(&file, cli)
            }
            Export::State { state } => {
                let (rho, dims) = load_state(state, 9, cli.tol)?;
                emit_json(&BipartiteFile::new(rho.matrix().clone(), dims), cli)
            }
            Export::Stable { map } => emit_json(&stable_subspace_file(map, cli.tol)?, cli),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
