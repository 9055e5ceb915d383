//! Flag definitions, their JSON config counterparts, and the merge of
//! both layers into validated run parameters.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use micromaser::jcm::effective_rabi_angle;
use micromaser::steady::{ScanAxis, DEFAULT_TRAPPED_TOL};
use micromaser::{thermal_photon_number, MaserConfig, DEFAULT_N_MAX};
use serde::Deserialize;

use crate::error::CliError;
use crate::output::load_profile;

/// Angular frequency of `f` gigahertz, rad/s.
pub fn ghz_to_rad_per_s(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f * 1e9
}

#[derive(Debug, Parser)]
#[command(
    name = "micromaser",
    version,
    about = "One-atom maser simulation toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary photon statistics of the pumped cavity
    Steady(SteadyArgs),
    /// Steady-state observables swept along phi or the pump ratio
    Scan(ScanArgs),
    /// Integrate the photon distribution forward in time
    Evolve(EvolveArgs),
    /// Stochastic atom-by-atom simulation of the same process
    Trajectory(TrajectoryArgs),
    /// Reservoir photon number and its geometric distribution
    Thermal(ThermalArgs),
    /// Photon numbers the pump cannot cross at the given Rabi angle
    Trapped(TrappedArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Phi,
    PumpRatio,
}

impl From<Axis> for ScanAxis {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::Phi => ScanAxis::Phi,
            Axis::PumpRatio => ScanAxis::PumpRatio,
        }
    }
}

/// Initial field state of an `evolve` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Vacuum,
    Thermal,
    Fock(usize),
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Vacuum => write!(f, "vacuum"),
            InitialState::Thermal => write!(f, "thermal"),
            InitialState::Fock(k) => write!(f, "fock:{k}"),
        }
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vacuum" => Ok(InitialState::Vacuum),
            "thermal" => Ok(InitialState::Thermal),
            _ => match s.strip_prefix("fock:") {
                Some(k) => k
                    .parse()
                    .map(InitialState::Fock)
                    .map_err(|_| format!("bad Fock index {k:?}; use fock:K with integer K")),
                None => Err(format!(
                    "unknown initial state {s:?}; use vacuum, thermal or fock:K"
                )),
            },
        }
    }
}

/// Flags shared by every subcommand. All optional so a JSON config can
/// fill the gaps; hard defaults are listed in the help text.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Cavity mode frequency, GHz [default: 21.5]
    #[arg(long, value_name = "GHZ", allow_negative_numbers = true)]
    pub omega_ghz: Option<f64>,

    /// Excited-atom arrival rate r, 1/s [default: 0]
    #[arg(long, value_name = "RATE", allow_negative_numbers = true)]
    pub pump_rate: Option<f64>,

    /// Cavity energy decay rate A, 1/s [default: 1]
    #[arg(long = "decay-A", value_name = "RATE", allow_negative_numbers = true)]
    pub decay_a: Option<f64>,

    /// Pump ratio r/A, dimensionless; sets the pump rate from A instead
    /// of --pump-rate
    #[arg(long, value_name = "RATIO", allow_negative_numbers = true)]
    pub pump_ratio: Option<f64>,

    /// Reservoir photon number, dimensionless [default: 0]
    #[arg(long, value_name = "NU", allow_negative_numbers = true)]
    pub nu: Option<f64>,

    /// Reservoir temperature, K; sets --nu from the mode frequency
    #[arg(long, value_name = "KELVIN", allow_negative_numbers = true)]
    pub temperature_k: Option<f64>,

    /// Accumulated Rabi angle per transit, rad [default: 0]
    #[arg(long, value_name = "RAD", allow_negative_numbers = true)]
    pub phi: Option<f64>,

    /// Coupling profile CSV with columns time_s (s) and g_rad_per_s
    /// (rad/s); its time integral replaces --phi
    #[arg(long, value_name = "PATH")]
    pub profile: Option<PathBuf>,

    /// Cavity length for profile ingestion, m [default: 0.024]
    #[arg(long, value_name = "METERS", allow_negative_numbers = true)]
    pub cavity_length_m: Option<f64>,

    /// Atom speed for profile ingestion, m/s [default: 480]
    #[arg(long, value_name = "SPEED", allow_negative_numbers = true)]
    pub atom_speed_m_s: Option<f64>,

    /// Fock-space cutoff [default: 256]
    #[arg(long, value_name = "N")]
    pub n_max: Option<usize>,

    /// RNG seed for stochastic commands [default: 1]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output file; stdout when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format [default: csv]
    #[arg(long, value_enum, value_name = "FMT")]
    pub format: Option<OutputFormat>,

    /// JSON config with the same kebab-case keys as the flags; explicit
    /// flags override it, and a flag from an exclusive pair (pump,
    /// reservoir, angle, scan values) replaces the whole pair
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Which parameter to sweep
    #[arg(long, value_enum, value_name = "AXIS")]
    pub axis: Option<Axis>,

    /// Explicit scan values, comma separated (rad for phi, dimensionless
    /// for pump-ratio)
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "V1,V2,...",
        allow_hyphen_values = true
    )]
    pub values: Option<Vec<f64>>,

    /// Grid start (axis units)
    #[arg(long, value_name = "START", allow_negative_numbers = true)]
    pub from: Option<f64>,

    /// Grid end (axis units)
    #[arg(long, value_name = "END", allow_negative_numbers = true)]
    pub to: Option<f64>,

    /// Grid point count
    #[arg(long, value_name = "N")]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Initial state: vacuum, thermal, or fock:K [default: vacuum]
    #[arg(long, value_name = "STATE")]
    pub initial: Option<InitialState>,

    /// Integration time, s
    #[arg(long, value_name = "SECONDS", allow_negative_numbers = true)]
    pub duration: Option<f64>,

    /// Relative tolerance of the adaptive stepper [default: 1e-9]
    #[arg(long, value_name = "TOL", allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Number of pump atoms to simulate
    #[arg(long, value_name = "N")]
    pub atoms: Option<u64>,

    /// Atom transit time, s [default: 5e-5]
    #[arg(long, value_name = "SECONDS", allow_negative_numbers = true)]
    pub transit_time_s: Option<f64>,

    /// Drop statistics recorded before this time, s [default: 0]
    #[arg(long, value_name = "SECONDS", allow_negative_numbers = true)]
    pub burn_in_s: Option<f64>,

    /// Also report the total-variation distance to the analytic steady
    /// state (JSON output)
    #[arg(long)]
    pub compare_steady: bool,
}

#[derive(Debug, Args)]
pub struct ThermalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TrappedArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Residual tolerance for calling a rung trapped, rad [default: 1e-9]
    #[arg(long, value_name = "RAD", allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

/// JSON counterpart of every flag except --config itself. Unknown keys
/// are rejected so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub omega_ghz: Option<f64>,
    pub pump_rate: Option<f64>,
    #[serde(rename = "decay-A", alias = "decay-a")]
    pub decay_a: Option<f64>,
    pub pump_ratio: Option<f64>,
    pub nu: Option<f64>,
    pub temperature_k: Option<f64>,
    pub phi: Option<f64>,
    pub profile: Option<PathBuf>,
    pub cavity_length_m: Option<f64>,
    pub atom_speed_m_s: Option<f64>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub axis: Option<Axis>,
    pub values: Option<Vec<f64>>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub initial: Option<String>,
    pub duration: Option<f64>,
    pub rel_tol: Option<f64>,
    pub atoms: Option<u64>,
    pub transit_time_s: Option<f64>,
    pub burn_in_s: Option<f64>,
    pub compare_steady: Option<bool>,
    pub tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
    }
}

/// Merged common parameters with every default applied.
pub struct Resolved {
    pub cfg: MaserConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

enum Pump {
    Rate(f64),
    Ratio(f64),
}

enum Reservoir {
    Nu(f64),
    Temperature(f64),
}

enum Angle {
    Phi(f64),
    Profile(PathBuf),
}

pub fn resolve_common(cli: &CommonArgs, file: &FileConfig) -> Result<Resolved, CliError> {
    let omega = ghz_to_rad_per_s(cli.omega_ghz.or(file.omega_ghz).unwrap_or(21.5));
    let decay = cli.decay_a.or(file.decay_a).unwrap_or(1.0);

    let pump = match (cli.pump_rate, cli.pump_ratio) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "--pump-rate and --pump-ratio are redundant; give only one",
            ))
        }
        (Some(r), None) => Some(Pump::Rate(r)),
        (None, Some(x)) => Some(Pump::Ratio(x)),
        (None, None) => match (file.pump_rate, file.pump_ratio) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation(
                    "config sets both pump-rate and pump-ratio; give only one",
                ))
            }
            (Some(r), None) => Some(Pump::Rate(r)),
            (None, Some(x)) => Some(Pump::Ratio(x)),
            (None, None) => None,
        },
    };
    let pump_rate = match pump {
        Some(Pump::Rate(r)) => r,
        Some(Pump::Ratio(x)) if x.is_finite() && x >= 0.0 => x * decay,
        Some(Pump::Ratio(_)) => {
            return Err(CliError::validation("pump-ratio must be finite and >= 0"))
        }
        None => 0.0,
    };

    let reservoir = match (cli.nu, cli.temperature_k) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "--nu and --temperature-k are redundant; give only one",
            ))
        }
        (Some(v), None) => Some(Reservoir::Nu(v)),
        (None, Some(t)) => Some(Reservoir::Temperature(t)),
        (None, None) => match (file.nu, file.temperature_k) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation(
                    "config sets both nu and temperature-k; give only one",
                ))
            }
            (Some(v), None) => Some(Reservoir::Nu(v)),
            (None, Some(t)) => Some(Reservoir::Temperature(t)),
            (None, None) => None,
        },
    };
    let nu = match reservoir {
        Some(Reservoir::Nu(v)) => v,
        Some(Reservoir::Temperature(t)) => thermal_photon_number(t, omega)?,
        None => 0.0,
    };

    let angle = match (cli.phi, &cli.profile) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "--phi and --profile are redundant; give only one",
            ))
        }
        (Some(p), None) => Some(Angle::Phi(p)),
        (None, Some(path)) => Some(Angle::Profile(path.clone())),
        (None, None) => match (file.phi, &file.profile) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation(
                    "config sets both phi and profile; give only one",
                ))
            }
            (Some(p), None) => Some(Angle::Phi(p)),
            (None, Some(path)) => Some(Angle::Profile(path.clone())),
            (None, None) => None,
        },
    };
    let length = cli
        .cavity_length_m
        .or(file.cavity_length_m)
        .unwrap_or(0.024);
    let speed = cli.atom_speed_m_s.or(file.atom_speed_m_s).unwrap_or(480.0);
    let phi = match angle {
        Some(Angle::Phi(p)) => p,
        Some(Angle::Profile(path)) => {
            let profile = load_profile(&path, length, speed)?;
            effective_rabi_angle(&profile)?.phi
        }
        None => 0.0,
    };

    let n_max = cli.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
    let cfg = MaserConfig::new(omega, pump_rate, decay, nu, phi, n_max)?;
    Ok(Resolved {
        cfg,
        seed: cli.seed.or(file.seed).unwrap_or(1),
        out: cli.out.clone().or_else(|| file.out.clone()),
        format: cli.format.or(file.format).unwrap_or(OutputFormat::Csv),
    })
}

pub struct ScanSpec {
    pub axis: ScanAxis,
    pub values: Vec<f64>,
}

pub fn resolve_scan(args: &ScanArgs, file: &FileConfig) -> Result<ScanSpec, CliError> {
    let axis = args
        .axis
        .or(file.axis)
        .ok_or_else(|| CliError::validation("scan needs --axis phi or --axis pump-ratio"))?;
    let cli_has_any =
        args.values.is_some() || args.from.is_some() || args.to.is_some() || args.points.is_some();
    let values = if cli_has_any {
        value_spec(args.values.clone(), args.from, args.to, args.points)?
    } else if file.values.is_some()
        || file.from.is_some()
        || file.to.is_some()
        || file.points.is_some()
    {
        value_spec(file.values.clone(), file.from, file.to, file.points)?
    } else {
        return Err(CliError::validation(
            "scan needs --values or --from/--to/--points",
        ));
    };
    Ok(ScanSpec {
        axis: axis.into(),
        values,
    })
}

fn value_spec(
    values: Option<Vec<f64>>,
    from: Option<f64>,
    to: Option<f64>,
    points: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    match (values, from, to, points) {
        (Some(_), f, t, p) if f.is_some() || t.is_some() || p.is_some() => Err(
            CliError::validation("values and from/to/points are redundant; give only one form"),
        ),
        (Some(v), ..) if v.is_empty() => Err(CliError::validation("scan needs at least one value")),
        (Some(v), ..) => Ok(v),
        (None, Some(f), Some(t), Some(p)) => grid(f, t, p),
        _ => Err(CliError::validation(
            "grid scans need all of from, to and points",
        )),
    }
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::validation("--from and --to must be finite"));
    }
    if points == 0 {
        return Err(CliError::validation("--points must be >= 1"));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points).map(|i| from + step * i as f64).collect())
}

pub struct EvolveSpec {
    pub initial: InitialState,
    pub duration: f64,
    pub rel_tol: f64,
}

pub fn resolve_evolve(args: &EvolveArgs, file: &FileConfig) -> Result<EvolveSpec, CliError> {
    let initial = match (args.initial, &file.initial) {
        (Some(i), _) => i,
        (None, Some(s)) => s.parse().map_err(CliError::Validation)?,
        (None, None) => InitialState::Vacuum,
    };
    let duration = args
        .duration
        .or(file.duration)
        .ok_or_else(|| CliError::validation("evolve needs --duration in seconds"))?;
    Ok(EvolveSpec {
        initial,
        duration,
        rel_tol: args.rel_tol.or(file.rel_tol).unwrap_or(1e-9),
    })
}

pub struct TrajectorySpec {
    pub atoms: u64,
    pub transit_time_s: f64,
    pub burn_in_s: f64,
    pub compare_steady: bool,
}

pub fn resolve_trajectory(
    args: &TrajectoryArgs,
    file: &FileConfig,
) -> Result<TrajectorySpec, CliError> {
    let atoms = args
        .atoms
        .or(file.atoms)
        .ok_or_else(|| CliError::validation("trajectory needs --atoms"))?;
    if atoms == 0 {
        return Err(CliError::validation("--atoms must be >= 1"));
    }
    Ok(TrajectorySpec {
        atoms,
        transit_time_s: args.transit_time_s.or(file.transit_time_s).unwrap_or(5e-5),
        burn_in_s: args.burn_in_s.or(file.burn_in_s).unwrap_or(0.0),
        compare_steady: args.compare_steady || file.compare_steady.unwrap_or(false),
    })
}

pub fn resolve_trapped_tol(args: &TrappedArgs, file: &FileConfig) -> f64 {
    args.tol.or(file.tol).unwrap_or(DEFAULT_TRAPPED_TOL)
}
