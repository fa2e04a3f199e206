use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aecode::cli::{cmd_analyze, cmd_baseline, cmd_evaluate, cmd_export, cmd_train, Overrides};
use aecode::config::Grid;
use aecode::evaluation::DecoderKind;

/// Train and benchmark learned channel codes for the AWGN channel.
#[derive(Parser)]
#[command(name = "aecode", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    decoder: Option<DecoderArg>,
    /// Eb/N0 grid in dB, inclusive.
    #[arg(long, global = true, value_name = "LO:HI:STEP")]
    grid: Option<Grid>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Neural,
    Ml,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it to a new run directory.
    Train,
    /// Monte Carlo BLER/BER of a saved model or codebook file.
    Evaluate { artifact: PathBuf },
    /// Pairwise distances of a codebook.
    Analyze { artifact: PathBuf },
    /// Extended Hamming (8,4) reference curve and union bound.
    Baseline,
    /// Write the codebook of a saved model.
    Export { artifact: PathBuf },
}

fn run(cli: Cli) -> aecode::Result<()> {
    let c = cli.common;
    let overrides = Overrides {
        seed: c.seed,
        out: c.out,
        decoder: c.decoder.map(|d| match d {
            DecoderArg::Neural => DecoderKind::Neural,
            DecoderArg::Ml => DecoderKind::Ml,
        }),
        grid: c.grid,
    };
    let config = c.config.as_deref();
    match cli.command {
        Command::Train => {
            let Some(path) = config else {
                return Err(aecode::Error::Config("train requires --config".into()));
            };
            let a = cmd_train(path, &overrides)?;
            println!(
                "trained {} epochs{}",
                a.epochs,
                if a.stopped_early { " (early stop)" } else { "" }
            );
            for p in [&a.model, &a.codebook, &a.trace, &a.config] {
                println!("wrote {}", p.display());
            }
        }
        Command::Evaluate { artifact } => {
            let path = cmd_evaluate(&artifact, config, &overrides)?;
            println!("wrote {}", path.display());
        }
        Command::Analyze { artifact } => {
            let a = cmd_analyze(&artifact, config, &overrides)?;
            let s = a.summary;
            println!(
                "d_min {:.4} ({}) d_avg {:.4} ({}) d_max {:.4} ({}) eps {}",
                s.d_min, s.n_at_min, s.d_avg, s.n_at_avg, s.d_max, s.n_at_max, s.tolerance
            );
            println!("wrote {}", a.matrix.display());
            println!("wrote {}", a.stats.display());
        }
        Command::Baseline => {
            let a = cmd_baseline(config, &overrides)?;
            println!("wrote {}", a.csv.display());
            println!("wrote {}", a.codebook.display());
        }
        Command::Export { artifact } => {
            let path = cmd_export(&artifact, &overrides)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
