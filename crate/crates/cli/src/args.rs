use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qpgame", version, about = "Solver and engine for the queens placing game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the game for a range of board sizes and write the listing.
    Check(CheckArgs),
    /// Build player-2 answer tables by search.
    #[command(name = "tables-generate")]
    TablesGenerate(TablesGenerateArgs),
    /// Check an answer-table file for invariant violations.
    #[command(name = "tables-validate")]
    TablesValidate(TablesValidateArgs),
    /// Play one game with a strategy against a random or interactive opponent.
    Demo(DemoArgs),
    /// Run the HTTP play service.
    Serve(ServeArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CheckArgs {
    /// Smallest n. Without --min and --max the even sizes 6..=12 are checked.
    #[arg(long)]
    pub min: Option<usize>,
    /// Largest n.
    #[arg(long)]
    pub max: Option<usize>,
    /// Skip odd n inside the range.
    #[arg(long)]
    pub even_only: bool,
    /// Let player 1 play center-then-mirror on odd boards (the default).
    #[arg(long, overrides_with = "no_odd_strategy")]
    pub odd_strategy: bool,
    /// Search odd boards exhaustively instead of verifying the mirror strategy.
    #[arg(long)]
    pub no_odd_strategy: bool,
    /// Do not restrict player 1 to the upper half while player 2 mirrors.
    #[arg(long)]
    pub no_rotsym: bool,
    /// Do not skip replies that already refuted a sibling move.
    #[arg(long)]
    pub no_forbidden: bool,
    /// Try every first move instead of one per symmetry class.
    #[arg(long)]
    pub no_canonical: bool,
    /// Do not force the inner start on even boards up to 8.
    #[arg(long)]
    pub no_inner_start: bool,
    /// Always scan replies from row 0.
    #[arg(long)]
    pub no_row_rotation: bool,
    /// Pin player 2's first two replies from an answer-table file.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Listing file.
    #[arg(long, env = "QPGAME_LISTING", default_value = qpgame_core::reporting::DEFAULT_LISTING)]
    pub listing: PathBuf,
    /// Machine-readable results.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Calls between progress marks.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub progress_interval: u64,
    /// Suppress the progress marks.
    #[arg(long)]
    pub no_progress: bool,
    /// Per-first-move summary lines (default: on for n >= 16).
    #[arg(long)]
    pub first_move_stats: Option<bool>,
    /// Third-move progress markers (default: on for n >= 16).
    #[arg(long)]
    pub third_move_markers: Option<bool>,
}

#[derive(Debug, Args)]
pub struct TablesGenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Permit n above 12 (expect very long runs).
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Args)]
pub struct TablesValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    MirrorOdd,
    InnerFour,
    Tables,
    Perfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryArg {
    Random,
    Stdin,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "random")]
    pub adversary: AdversaryArg,
    /// Answer tables for the `tables` strategy.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Seed for the random adversary.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory with the built web board (index.html, assets/).
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}
