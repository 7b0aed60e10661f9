use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopgame::{Mode, PayoffMatrix};

#[derive(Parser, Debug)]
#[command(name = "coopgame", version, about = "Kin selection, two-locus dynamics and iterated play in 2x2 games")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalOpts {
    /// Payoff matrix as T,R,P,S
    #[arg(long, global = true, value_name = "T,R,P,S", allow_hyphen_values = true)]
    pub payoffs: Option<PayoffMatrix>,
    /// Relatedness r
    #[arg(long = "r", global = true)]
    pub r: Option<f64>,
    /// Cooperation frequency (at the partner's locus in roles mode)
    #[arg(long, global = true)]
    pub fc: Option<f64>,
    /// single or roles
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo samples per estimate
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Grid points per axis for vector fields
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Points on a threshold curve
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    /// Initial frequencies, f1[,f2]
    #[arg(long, global = true, value_name = "F1[,F2]")]
    pub start: Option<String>,
    /// Population size for evolve
    #[arg(long, global = true)]
    pub size: Option<usize>,
    #[arg(long, global = true)]
    pub generations: Option<usize>,
    /// Number of evolve replicates, seeded consecutively from --seed
    #[arg(long, global = true)]
    pub replicates: Option<usize>,
    /// Constant added to payoffs before fitness-proportional resampling
    #[arg(long = "fitness-shift", global = true, allow_hyphen_values = true)]
    pub fitness_shift: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `figure`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON or TOML scenario file, or a JSON report from an earlier run
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ordinal class, synergy, decomposition and strong-altruism reading
    Classify,
    /// Benefit, cost and synergy (b, c, d)
    Decompose,
    /// Relatedness threshold at --fc, or the whole curve
    Threshold {
        #[arg(long)]
        curve: bool,
    },
    /// Mixed equilibrium and fixed points
    Equilibrium,
    /// Replicator vector field on a grid
    Phase,
    /// Replicator trajectory from --start
    Simulate,
    /// Agent-based estimates and evolution
    Abm {
        #[command(subcommand)]
        action: AbmAction,
    },
    /// Iterated match between two strategies (names or 5-letter genomes)
    Match { player1: String, player2: String },
    /// Data behind figure 1, 3, 4 or 5
    Figure {
        #[arg(value_parser = ["1", "3", "4", "5"])]
        which: String,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum AbmAction {
    /// Monte Carlo fitness estimates against the closed forms
    Estimate,
    /// Finite-population evolution under fitness-proportional resampling
    Evolve,
}
