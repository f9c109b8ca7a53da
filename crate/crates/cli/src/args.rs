use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctxscope::{PathLabel, StateSpec};

#[derive(Debug, Parser)]
#[command(name = "ctxscope", version, about = "Five-context three-path interferometer simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Base seed for every random draw.
    #[arg(long, global = true, env = "CTXSCOPE_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Output file, or `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    pub out: PathBuf,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify orthogonality, telescoping, reflectivities and the output-side witness identity.
    Check(CheckArgs),
    /// Propagate one state with optional interior modifiers.
    Run(RunArgs),
    /// Witness and counterfactual gain for one state.
    Witness(StateArg),
    /// Output distributions versus the phase on one interior path.
    PhaseScan(ScanArgs),
    /// Output distributions versus the MZI setting of a tunable absorber.
    TransScan(ScanArgs),
    /// Witness and gain over the real first-octant state grid.
    Sweep(SweepArgs),
    /// Poisson counts for one run.
    Sample(SampleArgs),
    /// Fit visibilities to a counts CSV.
    Fit(FitArgs),
    /// Ideal predictions next to the measured reference values.
    Reproduce,
}

#[derive(Debug, Args)]
pub struct StateArg {
    /// Named state (Nf, Bf, V0, basis1..3) or `a1r,a1i,a2r,a2i,a3r,a3i`.
    #[arg(long, allow_hyphen_values = true)]
    pub state: StateSpec,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Haar states used for the identity check.
    #[arg(long, default_value_t = ctxscope::check::IDENTITY_SAMPLES)]
    pub samples: usize,

    /// Tilt one path vector before checking.
    #[arg(long, hide = true)]
    pub perturb_basis: Option<PathLabel>,

    #[arg(long, hide = true, default_value_t = 1e-3)]
    pub perturb_size: f64,
}

#[derive(Debug, Args)]
pub struct ModifierArgs {
    /// Block an interior path (repeatable).
    #[arg(long)]
    pub block: Vec<PathLabel>,

    /// Phase shift `label=radians` (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Vec<String>,

    /// Amplitude transmission `label=tau` with tau in [0, 1] (repeatable).
    #[arg(long)]
    pub attenuate: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub state: StateArg,
    #[command(flatten)]
    pub mods: ModifierArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub state: StateArg,
    #[command(flatten)]
    pub mods: ModifierArgs,
    #[command(flatten)]
    pub exposure: Exposure,
}

#[derive(Debug, Args)]
pub struct Exposure {
    /// Detected photons per second.
    #[arg(long, default_value_t = ctxscope::stats::DEFAULT_RATE)]
    pub rate: f64,

    /// Integration time per setting in seconds.
    #[arg(long, default_value_t = ctxscope::stats::DEFAULT_DURATION)]
    pub duration: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub state: StateArg,

    /// Modulated interior path.
    #[arg(long, default_value = "f")]
    pub target: PathLabel,

    /// First setting in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,

    /// Last setting in radians (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,

    /// Number of settings.
    #[arg(long, default_value_t = 25)]
    pub steps: usize,

    /// Emit Poisson counts with this fringe visibility instead of probabilities.
    #[arg(long, visible_alias = "visibility")]
    pub noise: Option<f64>,

    #[command(flatten)]
    pub exposure: Exposure,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,

    /// Sample Haar-random complex states instead of the real grid.
    #[arg(long)]
    pub complex: bool,

    /// Number of complex states.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Counts CSV, or `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,

    /// State whose fringe model is fitted.
    #[arg(long)]
    pub model: StateSpec,

    /// Path carrying the phase modulation.
    #[arg(long, default_value = "f")]
    pub target: PathLabel,
}
