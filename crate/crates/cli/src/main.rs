use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kolakoski_core::{Alphabet, Budget, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_SYMBOLS};

mod commands;
mod report;

#[derive(Debug, Parser)]
#[command(
    name = "kolakoski",
    version,
    about = "Kolakoski sequences and the K(1,3) block/pillar tower"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Largest word, in symbols, that may be materialized or compared.
    #[arg(long, default_value_t = DEFAULT_MAX_SYMBOLS, global = true)]
    max_symbols: u64,

    /// Wall-clock limit in seconds for each long-running computation.
    #[arg(long, global = true)]
    time_limit: Option<f64>,

    /// Chunk length for streamed comparisons.
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE, global = true)]
    chunk_size: usize,

    /// Run independent checks and explorer probes concurrently.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the first n symbols of K(a,b).
    Generate {
        #[arg(long, value_parser = parse_alphabet, default_value = "1,3")]
        alphabet: Alphabet,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Level statistics of the K(1,3) tower.
    Stats {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Run structural checks for levels 1..=max-n.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        /// Comma-separated subset of prefix,step,lemma,identity, or "all".
        #[arg(long, default_value = "all", value_parser = commands::parse_checks)]
        checks: commands::CheckSet,
        /// Flip the symbol at POSITION of B_LEVEL before the prefix check.
        #[arg(long, value_name = "LEVEL:POSITION", hide = true, value_parser = commands::parse_fault)]
        inject_fault: Option<commands::Fault>,
    },
    /// Pisot root, limit density and limit-matrix spectrum.
    Spectral {
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Search K(a,b) for block/pillar decompositions.
    Explore {
        #[arg(long, value_parser = parse_alphabet)]
        alphabet: Alphabet,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        max_block: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        max_pillar: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
}

fn parse_alphabet(s: &str) -> Result<Alphabet, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two symbols like 1,3, got {s:?}"))?;
    let a: u8 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u8 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Alphabet::new(a, b).map_err(|e| e.to_string())
}

impl GlobalOpts {
    fn budget(&self) -> Result<Budget, String> {
        let mut budget = Budget::default()
            .with_max_symbols(self.max_symbols)
            .with_chunk_size(self.chunk_size);
        if let Some(secs) = self.time_limit {
            let limit = Duration::try_from_secs_f64(secs)
                .map_err(|e| format!("--time-limit {secs}: {e}"))?;
            budget = budget.with_time_limit(limit);
        }
        Ok(budget)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = match cli.global.budget() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let ctx = commands::Context {
        format: cli.global.format,
        budget,
        parallel: cli.global.parallel,
    };
    let outcome = match cli.command {
        Command::Generate { alphabet, n } => commands::generate(&ctx, alphabet, n),
        Command::Stats { max_n } => commands::stats(&ctx, max_n as usize),
        Command::Verify {
            max_n,
            checks,
            inject_fault,
        } => commands::verify(&ctx, max_n as usize, checks, inject_fault),
        Command::Spectral { tolerance } => commands::spectral(&ctx, tolerance),
        Command::Explore {
            alphabet,
            max_block,
            max_pillar,
            depth,
        } => commands::explore(
            &ctx,
            alphabet,
            kolakoski_core::SearchBounds {
                max_block: max_block as usize,
                max_pillar: max_pillar as usize,
                depth: depth as usize,
            },
        ),
    };

    let (text, code) = match outcome {
        Ok(out) => (out.text, if out.ok { 0 } else { 1 }),
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(err) = written {
        eprintln!("error: writing report: {err}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
