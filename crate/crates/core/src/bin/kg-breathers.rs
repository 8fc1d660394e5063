//! Command line driver: one verb per experiment plus `validate`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kg_breathers::experiment::{self, ExperimentConfig, ExperimentKind};
use kg_breathers::Error;

#[derive(Parser)]
#[command(name = "kg-breathers", version, about = "Discrete breathers of Klein-Gordon lattices")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Stationary dNLS soliton.
    Soliton(Common),
    /// Mass and energy along the single-pulse branch.
    PowerCurve(Common),
    /// Breather of the dKG lattice continued from the soliton.
    Breather(Common),
    /// Frequency and profile error scaling over an eps sweep.
    Bounds(Common),
    /// Floquet spectrum and eigenvalue scaling over an eps sweep.
    Spectrum(Common),
    /// Resonant normal form by Lie transforms.
    NormalForm(Common),
    /// Long-time integration of a perturbed breather.
    Stability(Common),
    /// Check a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

fn load(path: Option<&PathBuf>, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
    let Some(path) = path else { return Ok(ExperimentConfig::new(kind)) };
    let mut table: toml::Table = std::fs::read_to_string(path)?.parse()?;
    let name = kind.to_string();
    match table.get("experiment").and_then(|v| v.as_str()) {
        Some(found) if found != name => {
            return Err(Error::ConfigInvalid(vec![format!(
                "config names experiment '{found}' but the command runs '{name}'"
            )]))
        }
        _ => {
            table.insert("experiment".into(), toml::Value::String(name));
        }
    }
    Ok(table.try_into()?)
}

fn execute(kind: ExperimentKind, common: Common) -> Result<(), Error> {
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let mut cfg = load(common.config.as_ref(), kind)?;
    if let Some(out) = common.out {
        cfg.output = Some(out);
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let summary = experiment::run(&cfg)?;
    // a closed stdout (e.g. piped into `head`) is not an error of the run
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.verb {
        Verb::Soliton(c) => (ExperimentKind::SolveSoliton, c),
        Verb::PowerCurve(c) => (ExperimentKind::PowerCurve, c),
        Verb::Breather(c) => (ExperimentKind::SolveBreather, c),
        Verb::Bounds(c) => (ExperimentKind::BoundSweep, c),
        Verb::Spectrum(c) => (ExperimentKind::SpectrumSweep, c),
        Verb::NormalForm(c) => (ExperimentKind::NormalForm, c),
        Verb::Stability(c) => (ExperimentKind::StabilityRun, c),
        Verb::Validate { config } => {
            let violations = match ExperimentConfig::load(&config) {
                Ok(cfg) => experiment::validate(&cfg),
                Err(e) => vec![e.to_string()],
            };
            if violations.is_empty() {
                println!("ok");
                return ExitCode::SUCCESS;
            }
            for v in &violations {
                eprintln!("{v}");
            }
            return ExitCode::from(2);
        }
    };
    match execute(kind, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
