use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dqlab::{run_scenario, Command, Format, Overrides, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "dqlab", version, about = "Run a degenerate-level qubit scenario from a JSON config")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; CSV output uses it as a file stem.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides { seed: cli.seed, output: cli.out, format: cli.format };
    let result = ScenarioConfig::load(cli.command, &cli.config, overrides).and_then(|cfg| run_scenario(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
