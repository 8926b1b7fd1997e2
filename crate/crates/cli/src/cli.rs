use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fluxonium",
    version,
    about = "Spectrum, coherence budgets and measurement-protocol simulation for a fluxonium qubit",
    after_help = "The device config is taken from --config, else from $FLUXONIUM_CONFIG, else the bundled device."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Device config JSON (schema fluxonium-device/1)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts (created if missing)
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// RNG seed; overrides the config seed
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Single flux point, in flux quanta
    #[arg(long, global = true, value_name = "X", conflicts_with = "flux_range", allow_negative_numbers = true)]
    pub flux: Option<f64>,
    /// Flux sweep from A to B with N points
    #[arg(long, global = true, value_name = "A:B:N")]
    pub flux_range: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transition frequencies versus flux
    Spectrum(SpectrumArgs),
    /// Operator matrix elements between eigenstates versus flux
    Melem(MelemArgs),
    /// Predicted T1 budgets of the 0-1 and 0-2 transitions and x_qp bounds
    Budget(BudgetArgs),
    /// Optical-pumping T1^02 protocol: saturation trace and extracted T1^02
    Pump(PumpArgs),
    /// Readout calibration: decay deconvolution, temperature, blob fit
    #[command(name = "readout-cal")]
    ReadoutCal(ReadoutArgs),
    /// Randomized benchmarking (optionally interleaved)
    Rb(RbArgs),
    /// Purity benchmarking
    Pb(PbArgs),
    /// Fit circuit energies to spectroscopy data
    #[command(name = "fit-spectro")]
    FitSpectro(FitSpectroArgs),
    /// Fit a T1 or Ramsey trace
    #[command(name = "fit-trace")]
    FitTrace(FitTraceArgs),
    /// Pi/2 amplitude calibration from pulse trains
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Number of lowest levels; all transitions among them are reported
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Charge,
    Phase,
    Halfsin,
    Halfcos,
    All,
}

#[derive(Debug, Args)]
pub struct MelemArgs {
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "all")]
    pub operator: OperatorArg,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Measured T1^01 (ms) for the x_qp bound; defaults to the config value
    #[arg(long, value_name = "MS")]
    pub t1_01: Option<f64>,
    /// Measured T1^02 (ms) for the x_qp bound; defaults to the config value
    #[arg(long, value_name = "MS")]
    pub t1_02: Option<f64>,
    /// Upper loss tangent of the dielectric bracket, as a multiple of the config value
    #[arg(long, default_value_t = 3.0)]
    pub tan_delta_factor: f64,
}

#[derive(Debug, Args)]
pub struct PumpArgs {
    /// Injected T1^02 (ms); defaults to the config value
    #[arg(long, value_name = "MS", conflicts_with = "device")]
    pub t1_02: Option<f64>,
    /// Predict Γ02 from the device model (includes the thermal 2→3 path)
    #[arg(long)]
    pub device: bool,
    /// Quasiparticle density used with --device; defaults to the config value
    #[arg(long, value_name = "X", requires = "device")]
    pub x_qp: Option<f64>,
    /// Per-point readout noise on p0
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Drive-duration points; defaults to the config value
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReadoutArgs {
    /// Synthetic shot count; defaults to the config value
    #[arg(long)]
    pub shots: Option<usize>,
    /// Measured shots as CSV with header `I,Q` (fitted without calibrated centers)
    #[arg(long, value_name = "PATH")]
    pub shots_file: Option<PathBuf>,
    /// Histogram bins per axis
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    /// Synthetic blob separation in units of the blob standard deviation
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Sequence lengths, comma separated; defaults to the config value
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    /// Random sequences per length; defaults to the config value
    #[arg(long)]
    pub n_random: Option<usize>,
    /// Depolarizing probability per π/2 pulse
    #[arg(long)]
    pub depolarizing: Option<f64>,
    /// Relative over-rotation per pulse
    #[arg(long, allow_negative_numbers = true)]
    pub overrotation: Option<f64>,
    /// Amplitude-damping probability per pulse
    #[arg(long)]
    pub amplitude_damping: Option<f64>,
    /// Pure-dephasing probability per pulse
    #[arg(long)]
    pub dephasing: Option<f64>,
    /// Measurement shots per sequence (0: exact expectation values)
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
}

#[derive(Debug, Args)]
pub struct RbArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Physical gate interleaved after every Clifford, e.g. X/2 or -Y
    #[arg(long, value_name = "GATE", allow_hyphen_values = true)]
    pub interleave: Option<String>,
}

#[derive(Debug, Args)]
pub struct PbArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Args)]
pub struct FitSpectroArgs {
    /// CSV with header `flux,transition,freq_ghz`; synthetic data when absent
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Frequency noise (GHz) of synthetic data
    #[arg(long, default_value_t = 0.002)]
    pub noise_ghz: f64,
    /// Transitions of synthetic data, comma separated
    #[arg(long, value_delimiter = ',', default_value = "01,12,03")]
    pub transitions: Vec<String>,
    /// Starting energies E_C,E_L,E_J (GHz); defaults to the config circuit
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub init: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SyntheticTrace {
    T1,
    Ramsey,
}

#[derive(Debug, Args)]
pub struct FitTraceArgs {
    /// CSV with header `t_us,signal`
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub data: Option<PathBuf>,
    /// Model for --data: exponential or damped-cosine
    #[arg(long, default_value = "exponential")]
    pub model: String,
    /// Simulate a trace from the config lifetimes instead of reading one
    #[arg(long, value_enum)]
    pub synthetic: Option<SyntheticTrace>,
    /// Noise of synthetic traces
    #[arg(long, default_value_t = 0.02)]
    pub noise: f64,
    /// Points of synthetic traces
    #[arg(long, default_value_t = 60)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Lowest drive amplitude of the scan
    #[arg(long, default_value_t = 0.95)]
    pub min: f64,
    /// Highest drive amplitude of the scan
    #[arg(long, default_value_t = 1.05)]
    pub max: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// Amplitude producing an exact π/2 rotation
    #[arg(long, default_value_t = 1.0)]
    pub true_amplitude: f64,
    /// Readout noise per pulse-train point
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
}
