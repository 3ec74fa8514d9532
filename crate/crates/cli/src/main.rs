use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod numexpr;

use commands::Outcome;
use config::RunConfig;

/// Perfect hash families from solution-free sets.
///
/// Exit status: 0 on success, 1 when a verification fails (a witness is
/// printed), 2 on usage or precondition errors.
#[derive(Parser, Debug)]
#[command(name = "phfkit", version)]
struct Cli {
    /// Worker threads for parallel verification; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Terminating number, deletion character and deletion chain of a sequence.
    Seq(commands::SeqArgs),
    /// Equations L(U) of a set or a sequence, with ancestor strings.
    Equations(commands::EquationsArgs),
    /// The tower b_t = ⌊2^√log m⌋, b_i = ⌊2^√log b_{i+1}⌋.
    Tower(commands::TowerArgs),
    /// Build a solution-free set and its certificate.
    Solfree(commands::SolfreeArgs),
    /// Build or verify hash family matrices.
    Phf {
        #[command(subcommand)]
        command: commands::PhfCommand,
    },
    /// Upper and local-lemma lower bounds on the number of columns.
    Bounds(commands::BoundsArgs),
    /// Tabulate |M|, n = q|M| and the bounds over several q.
    Bench(commands::BenchArgs),
    /// Convert matrices between CSV and JSON, or certificates to text.
    Export(commands::ExportArgs),
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Seq(a) => commands::seq(a),
        Command::Equations(a) => commands::equations(a, &cfg),
        Command::Tower(a) => commands::tower(a, &cfg),
        Command::Solfree(a) => commands::solfree(a, &cfg),
        Command::Phf { command: commands::PhfCommand::Build(a) } => commands::phf_build(a, &cfg),
        Command::Phf { command: commands::PhfCommand::Verify(a) } => commands::phf_verify(a, &cfg),
        Command::Bounds(a) => commands::bounds(a, &cfg),
        Command::Bench(a) => commands::bench(a, &cfg),
        Command::Export(a) => commands::export(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
