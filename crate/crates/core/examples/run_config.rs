//! Runs an experiment described by a TOML file, as the command line does.
//!
//! `cargo run --example run_config -- path/to/config.toml`

use kg_breathers::experiment::{run, validate, ExperimentConfig};

fn main() -> kg_breathers::Result<()> {
    let path = std::env::args().nth(1).expect("usage: run_config <config.toml>");
    let cfg = ExperimentConfig::load(path.as_ref())?;
    let violations = validate(&cfg);
    if !violations.is_empty() {
        return Err(kg_breathers::Error::ConfigInvalid(violations));
    }
    let summary = run(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
