use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lowosc", version, about = "Exact low-oscillation constructions: evaluate, diagnose, export")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand; flags override the config file.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub construction: Option<ConstructionArg>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Offset into the quasi-random sample sequence.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number format for CSV columns.
    #[arg(long, global = true, value_enum)]
    pub numbers: Option<NumbersArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConstructionArg {
    Build1d,
    Buildmd,
    Cantor,
    Sine,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NumbersArg {
    Rational,
    Decimal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize the first generations and write tree metadata.
    Build {
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Whitney segments per side kept in 1-D listings.
        #[arg(long, default_value_t = 2)]
        max_k: u32,
    },
    /// Print a bracket of f at one point.
    Eval {
        /// Point, comma-separated coordinates such as `1/3` or `1/3,1/2`.
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "1/1048576")]
        eps: String,
    },
    /// Scaled oscillation profile at a point, or at Halton points.
    Oscillation {
        #[arg(long)]
        x: Option<String>,
        /// Number of Halton points when no point is given.
        #[arg(long, default_value_t = 8)]
        points: u64,
        /// Use scales 2^-1 .. 2^-k.
        #[arg(long, default_value_t = 12)]
        scales: u32,
    },
    /// Level-set report.
    Levelset {
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Grid points per axis for sampled level sets.
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[arg(long, default_value = "0")]
        tol: String,
    },
    /// Follow a level down the construction and write its certificate.
    Findpoint {
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = 5)]
        depth: u32,
    },
    /// Counting-proxy density ratio at the certificate point.
    Density {
        #[arg(long)]
        z: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, default_value_t = 48)]
        resolution: usize,
        #[arg(long, default_value = "0")]
        tol: String,
    },
    /// Annulus vacancy check at the certificate point.
    Annulus {
        #[arg(long)]
        z: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, default_value_t = 48)]
        resolution: usize,
        #[arg(long, default_value = "0")]
        tol: String,
    },
    /// Inscribed polyline length of a graph.
    Length {
        /// Left end of the interval (sine example).
        #[arg(long, default_value = "0.0001")]
        delta: f64,
        /// Approximant depth (piecewise-linear constructions).
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Graph samples as CSV.
    Export {
        /// Samples per axis.
        #[arg(long, default_value_t = 65)]
        samples: usize,
        #[arg(long, default_value = "1/1048576")]
        eps: String,
    },
}
