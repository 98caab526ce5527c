use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::grid::{parse_grid_size, parse_range, parse_split};
use crate::output::Format;

/// A parsed `START:STOP:STEP` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn grid(text: &str) -> Result<Grid, String> {
    parse_range(text).map(Grid)
}

#[derive(Debug, Parser)]
#[command(
    name = "etpa",
    version,
    about = "Classical, entangled and superposed two-photon absorption cross sections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical two-photon absorption spectrum in GM.
    Ctpa(CtpaArgs),
    /// Entangled two-photon absorption spectrum for an MC or BC pair, in cm^2.
    Etpa(EtpaArgs),
    /// Spectrum of an MC/BC superposition at fixed Bloch angles, in cm^2.
    Mcs(McsArgs),
    /// Superposition cross section over a theta x phi grid at one frequency.
    McsScan(McsScanArgs),
    /// Entangled cross section against entanglement time at one frequency.
    TeSweep(TeSweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingArg {
    /// isotropic average, perpendicular linear polarizations
    Perpendicular,
    /// isotropic average, parallel linear polarizations
    Parallel,
    /// molecule frame fixed to the lab frame, photons along x and y
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMode {
    Mc,
    Bc,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Molecule file (TOML).
    #[arg(long, short = 'm')]
    pub molecule: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "perpendicular")]
    pub averaging: AveragingArg,
}

/// Spectrum grid and final-state selection.
#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Half frequency omega_h in eV, START:STOP:STEP or a single value.
    #[arg(long, value_parser = grid, allow_hyphen_values = true)]
    pub omega_h: Grid,
    /// Final states to include (1-based, comma separated); default all.
    #[arg(long = "final", value_delimiter = ',')]
    pub finals: Vec<usize>,
    /// Final states within this many final linewidths of 2 omega_h contribute.
    #[arg(long, default_value_t = 10.0)]
    pub window: f64,
}

#[derive(Debug, Args)]
pub struct EntangledArgs {
    /// Intermediate-state linewidth kappa, eV.
    #[arg(long, default_value_t = 0.01)]
    pub kappa_ev: f64,
    /// Final-state linewidth Gamma, eV.
    #[arg(long, default_value_t = 1e-8)]
    pub gamma_ev: f64,
    /// Entanglement area, cm^2.
    #[arg(long, default_value_t = 1e-8)]
    pub area_cm2: f64,
}

#[derive(Debug, Args)]
pub struct CtpaArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    /// Intermediate-state linewidth, eV.
    #[arg(long, default_value_t = 0.05)]
    pub kappa_ev: f64,
    /// Final-state linewidth, eV.
    #[arg(long, default_value_t = 0.1)]
    pub gamma_ev: f64,
}

#[derive(Debug, Args)]
pub struct EtpaArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub entangled: EntangledArgs,
    #[arg(long, value_enum, default_value = "mc")]
    pub mode: PairMode,
    /// BC frequency split omega1':omega2'.
    #[arg(long, value_parser = parse_split, default_value = "1/3:2/3")]
    pub split: f64,
    /// Entanglement time, fs.
    #[arg(long, default_value_t = 100.0)]
    pub te: f64,
}

#[derive(Debug, Args)]
pub struct SuperpositionArgs {
    /// MC entanglement time, fs.
    #[arg(long, default_value_t = 100.0)]
    pub te: f64,
    /// BC entanglement time, fs.
    #[arg(long, default_value_t = 100.0)]
    pub te_prime: f64,
    /// BC frequency split omega1':omega2'.
    #[arg(long, value_parser = parse_split, default_value = "1/3:2/3")]
    pub split: f64,
}

#[derive(Debug, Args)]
pub struct McsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub entangled: EntangledArgs,
    #[command(flatten)]
    pub pairs: SuperpositionArgs,
    /// Polar Bloch angle, degrees in [0, 180].
    #[arg(long, default_value_t = 60.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Azimuthal Bloch angle, degrees in [0, 360].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
}

/// One frequency and one final state.
#[derive(Debug, Args)]
pub struct PointArgs {
    /// Half frequency omega_h, eV.
    #[arg(long)]
    pub omega_h: f64,
    /// Final state (1-based); default is the state closest to 2 omega_h.
    #[arg(long = "final")]
    pub final_state: Option<usize>,
    /// Place omega_h exactly on resonance with the selected final state.
    #[arg(long)]
    pub on_resonance: bool,
}

#[derive(Debug, Args)]
pub struct McsScanArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub entangled: EntangledArgs,
    #[command(flatten)]
    pub pairs: SuperpositionArgs,
    /// Grid size THETAxPHI; theta spans 0..180 deg and phi 0..360 deg.
    #[arg(long, value_parser = parse_grid_size, default_value = "181x361")]
    pub grid: (usize, usize),
}

#[derive(Debug, Args)]
pub struct TeSweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub entangled: EntangledArgs,
    /// Entanglement times in fs, START:STOP:STEP or a single value.
    #[arg(long, value_parser = grid, default_value = "20:100:20")]
    pub te_range: Grid,
    #[arg(long, value_enum, default_value = "mc")]
    pub mode: PairMode,
    /// BC frequency split omega1':omega2'.
    #[arg(long, value_parser = parse_split, default_value = "1/3:2/3")]
    pub split: f64,
}
