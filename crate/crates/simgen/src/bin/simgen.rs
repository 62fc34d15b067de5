use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grieferlens_simgen::scenario::DEFAULT_DURATION_S;
use grieferlens_simgen::{generate_corpus, generate_match, Injection, Scenario};

#[derive(Parser)]
#[command(name = "simgen", about = "Generate synthetic matches with injected griefers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one match.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DURATION_S)]
        duration: f64,
        /// Injection such as `P03:afk:200-400`, `P02:lane_steal:bot`,
        /// `P04:jungle_steal:late`, `P07:feeding:60`,
        /// `P05:non_participation` or `P01:position_steal:P02`.
        #[arg(long = "inject")]
        inject: Vec<Injection>,
        /// Telemetry output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ground-truth output file.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Generate a labelled corpus with a manifest.
    Corpus {
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        #[arg(long, default_value_t = 10)]
        per_archetype: usize,
        #[arg(long, default_value_t = 20)]
        baseline: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { seed, duration, inject, out, truth } => {
            let scenario = Scenario { seed, duration_s: duration, injections: inject };
            let (doc, labels) = generate_match(&scenario)?;
            match out {
                Some(path) => std::fs::write(&path, doc.to_json())
                    .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?,
                None => println!("{}", doc.to_json()),
            }
            if let Some(path) = truth {
                std::fs::write(&path, labels.to_json()).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?;
            }
        }
        Command::Corpus { base_seed, per_archetype, baseline, out } => {
            let manifest = generate_corpus(base_seed, per_archetype, baseline, &out)?;
            eprintln!("wrote {} matches to {}", manifest.entries.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simgen: {e:#}");
            ExitCode::FAILURE
        }
    }
}
