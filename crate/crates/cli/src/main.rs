//! Command-line driver: develop and verify difference families, compute
//! invariants, test isomorphism, compute automorphism groups, and search for
//! new families.
//!
//! Exit codes: 0 success/valid; 1 checked-and-invalid; 2 input/parse/config
//! error; 3 budget exhausted/inconclusive.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "steiner",
    version,
    about = "Difference-family workbench for Steiner systems"
)]
struct Cli {
    /// Worker threads for verification and census computations (0 = auto).
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    threads: usize,

    /// Node budget for canonical-labeling searches.
    #[arg(long, global = true, default_value_t = 10_000_000, value_name = "N")]
    budget_nodes: u64,

    /// Seed for seeded operations (search value order, sampling).
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,

    /// Use sampled invariants with this many quadruple draws.
    #[arg(long, global = true, value_name = "N")]
    sampled: Option<u64>,

    /// Stable line-oriented output for scripting.
    #[arg(long, global = true)]
    porcelain: bool,

    /// Suppress the banner line (which carries a timestamp).
    #[arg(long, global = true)]
    no_banner: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Develop a difference family file into a design file.
    Develop {
        family: PathBuf,
        /// Output design file.
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Verify that a design file is a Steiner system S(2,k,v).
    Verify { design: PathBuf },
    /// Print invariants of a design (replication histogram, diagonal census).
    Invariants { design: PathBuf },
    /// Decide whether two designs are isomorphic.
    Iso { left: PathBuf, right: PathBuf },
    /// Compute automorphism generators and the group order of a design.
    Aut {
        input: PathBuf,
        /// Seed the search with verified automorphisms: `translations`
        /// requires a family file input.
        #[arg(long, value_name = "KIND")]
        hint: Option<String>,
    },
    /// Search for difference families described by a config file.
    Search {
        config: PathBuf,
        /// Prefix for emitted family files (default: config path stem).
        #[arg(short, long, value_name = "PREFIX")]
        output: Option<PathBuf>,
    },
    /// Validate a group spec: actions, automorphism orders, realizability.
    GroupCheck {
        /// Group spec text, e.g. "SD(P(P(Z(5),Z(5)),Z(3)), 3, [4,4,0; 1,0,0; 0,0,1])".
        spec: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        threads: if cli.threads == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            cli.threads
        },
        budget_nodes: cli.budget_nodes,
        seed: cli.seed,
        sampled: cli.sampled,
        porcelain: cli.porcelain,
    };
    if !cli.no_banner {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        println!("# steiner {} at {now}", env!("CARGO_PKG_VERSION"));
    }
    let outcome = match cli.command {
        Command::Develop { family, output } => commands::develop(&ctx, &family, output.as_deref()),
        Command::Verify { design } => commands::verify(&ctx, &design),
        Command::Invariants { design } => commands::invariants(&ctx, &design),
        Command::Iso { left, right } => commands::iso(&ctx, &left, &right),
        Command::Aut { input, hint } => commands::aut(&ctx, &input, hint.as_deref()),
        Command::Search { config, output } => commands::search(&ctx, &config, output.as_deref()),
        Command::GroupCheck { spec } => commands::group_check(&ctx, &spec),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
