use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "telex",
    version,
    about = "Exit laws of telegraph and planar orthogonal random motions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format of tables.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write the table to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probabilities of leaving an interval through its upper endpoint.
    ExitProb(IntervalArgs),
    /// Mean exit times from an interval.
    ExitTime(IntervalArgs),
    /// Exit laws of the planar motion in the strip 0 <= y <= L.
    Strip(StripArgs),
    /// Monte Carlo estimates compared with the closed forms.
    Simulate(SimulateArgs),
    /// Data sets for the standard figures (written to the --out directory).
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct IntervalArgs {
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Starting point.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub x: Option<f64>,
    /// Sweep the starting point over N equally spaced points of [a, b].
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    pub model: TelegraphModelArgs,
    /// Report only the value conditional on this initial direction.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub dir: Option<u8>,
}

/// Either `--c --lambda` or the quartet `--c0 --c1 --lambda0 --lambda1`.
#[derive(Debug, Args, Clone, Copy)]
pub struct TelegraphModelArgs {
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StripQuantity {
    Prob,
    Time,
    Density,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct StripArgs {
    #[arg(value_enum)]
    pub quantity: StripQuantity,
    /// Strip height.
    #[arg(long = "L")]
    pub l: f64,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub y: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    /// Initial direction (required for density).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub dir: Option<u8>,
    /// Density grid; defaults to x - 3.
    #[arg(long = "z-min")]
    pub z_min: Option<f64>,
    /// Density grid; defaults to x + 3.
    #[arg(long = "z-max")]
    pub z_max: Option<f64>,
    /// Number of density grid points.
    #[arg(long, default_value_t = 121)]
    pub n: usize,
    /// Absolute tolerance of each density evaluation.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Integrand evaluations allowed per density value.
    #[arg(long, default_value_t = telex_core::quadrature::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModel {
    Telegraph,
    TelegraphDrift,
    PlanarStrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    UpperExit,
    BottomExit,
    ExitTime,
    NoSwitch,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::UpperExit => "upper-exit",
            Statistic::BottomExit => "bottom-exit",
            Statistic::ExitTime => "exit-time",
            Statistic::NoSwitch => "no-switch",
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: SimModel,
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub telegraph: TelegraphModelArgs,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Starting abscissa (interval or strip).
    #[arg(long)]
    pub x: Option<f64>,
    /// Strip height.
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Starting ordinate in the strip.
    #[arg(long)]
    pub y: Option<f64>,
    /// Initial direction index, or `random` for a uniform draw.
    #[arg(long, default_value = "random")]
    pub dir: String,
    /// Report only this statistic.
    #[arg(long, value_enum)]
    pub statistic: Option<Statistic>,
    /// Also write every simulated path to this CSV file.
    #[arg(long = "emit-paths")]
    pub emit_paths: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub id: u8,
    /// Paths per Monte Carlo column (figure 5).
    #[arg(long, default_value_t = 200_000)]
    pub paths: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Grid points per curve.
    #[arg(long, default_value_t = 101)]
    pub n: usize,
}
