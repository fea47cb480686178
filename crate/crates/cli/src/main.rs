//! `aklt`: spectral gaps, bond tests, verification protocols and
//! simulations for AKLT states.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aklt_core::hamiltonian::ChainKind;
use aklt_core::spin::Spin;

#[derive(Parser, Debug)]
#[command(name = "aklt", version, about = "Verification of AKLT states with local spin measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral gap of an AKLT Hamiltonian.
    Gap(GapArgs),
    /// Spectral gap of a bond verification operator.
    Bond(BondArgs),
    /// Analyse a verification protocol.
    Protocol(ProtocolArgs),
    /// Regenerate one of the reference tables (I to V).
    Tables(TablesArgs),
    /// Monte-Carlo run of a protocol on a noisy state.
    Simulate(SimulateArgs),
}

/// Selects a graph by chain type, catalog name or file.
#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Chain type: closed, open, open-half-one, open11.
    #[arg(long, requires = "n", conflicts_with_all = ["catalog", "graph"])]
    pub chain: Option<ChainKind>,
    /// Number of sites of the chain.
    #[arg(long)]
    pub n: Option<usize>,
    /// Catalog name such as atlas-5, chain-closed-7, star-4, kagome-2x2.
    #[arg(long, conflicts_with = "graph")]
    pub catalog: Option<String>,
    /// Graph file (JSON or edge list).
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
}

#[derive(Args, Debug)]
pub struct BondArgs {
    /// Builtin distribution, `isotropic`, or a distribution file.
    #[arg(long)]
    pub mu: String,
    /// Total spin of the bond sector.
    #[arg(long = "S", conflicts_with_all = ["s1", "s2"])]
    pub s: Option<Spin>,
    /// Spin of the first site of the bond.
    #[arg(long = "S1", requires = "s2")]
    pub s1: Option<Spin>,
    /// Spin of the second site of the bond.
    #[arg(long = "S2", requires = "s1")]
    pub s2: Option<Spin>,
}

#[derive(Args, Debug, Clone)]
pub struct ProtocolSelect {
    /// Protocol description file (JSON).
    #[arg(long, conflicts_with_all = ["chain", "catalog", "graph"])]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Bond distribution (builtin name, `isotropic`, or file).
    #[arg(long)]
    pub mu: Option<String>,
    /// Matching cover: trivial, optimal, coloring, maximal, Mn, M<k>.
    #[arg(long)]
    pub cover: Option<String>,
    /// Same as --cover, for edge colorings.
    #[arg(long, conflicts_with = "cover")]
    pub coloring: Option<String>,
    /// Probabilities: uniform, optimal, proportional, or comma-separated values.
    #[arg(long)]
    pub p: Option<String>,
}

#[derive(Args, Debug)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub select: ProtocolSelect,
    /// Infidelity to detect.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Significance level.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    #[value(name = "III")]
    III,
    #[value(name = "IV")]
    IV,
    #[value(name = "V")]
    V,
}

#[derive(Args, Debug)]
pub struct TablesArgs {
    #[arg(value_enum)]
    pub which: Table,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub select: ProtocolSelect,
    /// target, depolarize:EPS or worst:EPS.
    #[arg(long, default_value = "target")]
    pub noise: String,
    /// Number of protocol runs.
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    /// Seed for the random stream.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match commands::run(&cli.command, cli.format, cli.out.as_deref(), &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
