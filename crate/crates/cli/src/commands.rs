//! One function per subcommand: merge flags, compute, emit.

use std::io::Write;

use micromaser::master::integrate_diagonal;
use micromaser::steady::{self, ScanAxis};
use micromaser::trajectory;
use micromaser::{thermal_distribution, MaserConfig, PhotonDistribution};
use serde::Serialize;

use crate::args::{
    resolve_common, resolve_evolve, resolve_scan, resolve_trajectory, resolve_trapped_tol,
    EvolveArgs, FileConfig, InitialState, OutputFormat, ScanArgs, SteadyArgs, ThermalArgs,
    TrajectoryArgs, TrappedArgs,
};
use crate::error::CliError;
use crate::output::{csv_writer, fmt_f64, open_sink, write_json};

/// Flag-named echo of the operating point, included in JSON payloads so
/// a result file documents the run that produced it.
#[derive(Serialize)]
struct ConfigEcho {
    #[serde(rename = "omega-ghz")]
    omega_ghz: f64,
    #[serde(rename = "pump-rate")]
    pump_rate: f64,
    #[serde(rename = "decay-A")]
    decay_a: f64,
    nu: f64,
    phi: f64,
    #[serde(rename = "n-max")]
    n_max: usize,
}

impl ConfigEcho {
    fn new(cfg: &MaserConfig) -> Self {
        Self {
            omega_ghz: cfg.omega() / (2.0 * std::f64::consts::PI * 1e9),
            pump_rate: cfg.pump_rate(),
            decay_a: cfg.decay_rate(),
            nu: cfg.nu(),
            phi: cfg.phi(),
            n_max: cfg.n_max(),
        }
    }
}

fn write_distribution_csv(out: &mut dyn Write, dist: &PhotonDistribution) -> Result<(), CliError> {
    let mut w = csv_writer(out);
    w.write_record(["n", "p"])?;
    for (n, p) in dist.probs().iter().enumerate() {
        w.write_record([n.to_string(), fmt_f64(*p)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SteadyPayload {
    config: ConfigEcho,
    mean: f64,
    variance: f64,
    mandel_q: f64,
    fano: f64,
    detailed_balance_residual: f64,
    atom_down_probability: f64,
    trapped_below: Option<usize>,
    distribution: Vec<f64>,
}

pub fn steady(args: &SteadyArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = resolve_common(&args.common, &file)?;
    let report = steady::steady_report(&run.cfg)?;
    let mut out = open_sink(run.out.as_deref())?;
    match run.format {
        OutputFormat::Csv => {
            {
                let mut w = csv_writer(&mut *out);
                w.write_record([
                    "mean",
                    "variance",
                    "mandel_q",
                    "fano",
                    "detailed_balance_residual",
                    "atom_down_probability",
                    "trapped_below",
                    "n_max",
                ])?;
                w.write_record([
                    fmt_f64(report.stats.mean),
                    fmt_f64(report.stats.variance),
                    fmt_f64(report.stats.mandel_q),
                    fmt_f64(report.stats.fano),
                    fmt_f64(report.detailed_balance_residual),
                    fmt_f64(report.atom_down_probability),
                    report
                        .trapped_below
                        .map_or(String::new(), |n| n.to_string()),
                    report.distribution.n_max().to_string(),
                ])?;
                w.flush()?;
            }
            out.write_all(b"\n")?;
            write_distribution_csv(&mut *out, &report.distribution)?;
        }
        OutputFormat::Json => {
            write_json(
                &mut *out,
                &SteadyPayload {
                    config: ConfigEcho::new(&run.cfg),
                    mean: report.stats.mean,
                    variance: report.stats.variance,
                    mandel_q: report.stats.mandel_q,
                    fano: report.stats.fano,
                    detailed_balance_residual: report.detailed_balance_residual,
                    atom_down_probability: report.atom_down_probability,
                    trapped_below: report.trapped_below,
                    distribution: report.distribution.probs().to_vec(),
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanRow {
    value: f64,
    mean: Option<f64>,
    variance: Option<f64>,
    mandel_q: Option<f64>,
    fano: Option<f64>,
    detailed_balance_residual: Option<f64>,
    atom_down_probability: Option<f64>,
    trapped_below: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ScanPayload {
    config: ConfigEcho,
    axis: &'static str,
    points: Vec<ScanRow>,
}

pub fn scan(args: &ScanArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = resolve_common(&args.common, &file)?;
    let spec = resolve_scan(args, &file)?;
    let points = steady::pump_scan(&run.cfg, spec.axis, &spec.values)?;
    let axis_label = match spec.axis {
        ScanAxis::Phi => "phi",
        ScanAxis::PumpRatio => "pump-ratio",
    };
    let mut out = open_sink(run.out.as_deref())?;
    match run.format {
        OutputFormat::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record([
                "index",
                "value",
                "mean",
                "variance",
                "mandel_q",
                "fano",
                "detailed_balance_residual",
                "atom_down_probability",
                "trapped_below",
                "error",
            ])?;
            for (i, point) in points.iter().enumerate() {
                let row = match &point.report {
                    Ok(rep) => [
                        i.to_string(),
                        fmt_f64(point.value),
                        fmt_f64(rep.stats.mean),
                        fmt_f64(rep.stats.variance),
                        fmt_f64(rep.stats.mandel_q),
                        fmt_f64(rep.stats.fano),
                        fmt_f64(rep.detailed_balance_residual),
                        fmt_f64(rep.atom_down_probability),
                        rep.trapped_below.map_or(String::new(), |n| n.to_string()),
                        String::new(),
                    ],
                    Err(e) => [
                        i.to_string(),
                        fmt_f64(point.value),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string(),
                    ],
                };
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let rows = points
                .iter()
                .map(|point| match &point.report {
                    Ok(rep) => ScanRow {
                        value: point.value,
                        mean: Some(rep.stats.mean),
                        variance: Some(rep.stats.variance),
                        mandel_q: Some(rep.stats.mandel_q),
                        fano: Some(rep.stats.fano),
                        detailed_balance_residual: Some(rep.detailed_balance_residual),
                        atom_down_probability: Some(rep.atom_down_probability),
                        trapped_below: rep.trapped_below,
                        error: None,
                    },
                    Err(e) => ScanRow {
                        value: point.value,
                        mean: None,
                        variance: None,
                        mandel_q: None,
                        fano: None,
                        detailed_balance_residual: None,
                        atom_down_probability: None,
                        trapped_below: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            write_json(
                &mut *out,
                &ScanPayload {
                    config: ConfigEcho::new(&run.cfg),
                    axis: axis_label,
                    points: rows,
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EvolvePayload {
    config: ConfigEcho,
    initial: String,
    duration_s: f64,
    rel_tol: f64,
    final_mean: f64,
    trace_drift: f64,
    negative_dust: f64,
    steps: u64,
    times_s: Vec<f64>,
    mean_photon: Vec<f64>,
    distribution: Vec<f64>,
}

pub fn evolve(args: &EvolveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = resolve_common(&args.common, &file)?;
    let spec = resolve_evolve(args, &file)?;
    let initial = match spec.initial {
        InitialState::Vacuum => PhotonDistribution::vacuum(run.cfg.n_max()),
        InitialState::Thermal => thermal_distribution(run.cfg.nu(), run.cfg.n_max())?,
        InitialState::Fock(k) => PhotonDistribution::fock(k, run.cfg.n_max())?,
    };
    let evo = integrate_diagonal(&initial, &run.cfg, spec.duration, spec.rel_tol)?;
    let final_mean = evo.final_state.statistics().mean;
    let mut out = open_sink(run.out.as_deref())?;
    match run.format {
        OutputFormat::Csv => {
            {
                let mut w = csv_writer(&mut *out);
                w.write_record([
                    "initial",
                    "duration_s",
                    "rel_tol",
                    "final_mean",
                    "trace_drift",
                    "negative_dust",
                    "steps",
                ])?;
                w.write_record([
                    spec.initial.to_string(),
                    fmt_f64(spec.duration),
                    fmt_f64(spec.rel_tol),
                    fmt_f64(final_mean),
                    fmt_f64(evo.trace_drift),
                    fmt_f64(evo.negative_dust),
                    evo.steps_taken.to_string(),
                ])?;
                w.flush()?;
            }
            out.write_all(b"\n")?;
            {
                let mut w = csv_writer(&mut *out);
                w.write_record(["time_s", "mean_photon"])?;
                for (t, m) in evo.times.iter().zip(&evo.mean_photon) {
                    w.write_record([fmt_f64(*t), fmt_f64(*m)])?;
                }
                w.flush()?;
            }
            out.write_all(b"\n")?;
            write_distribution_csv(&mut *out, &evo.final_state)?;
        }
        OutputFormat::Json => {
            write_json(
                &mut *out,
                &EvolvePayload {
                    config: ConfigEcho::new(&run.cfg),
                    initial: spec.initial.to_string(),
                    duration_s: spec.duration,
                    rel_tol: spec.rel_tol,
                    final_mean,
                    trace_drift: evo.trace_drift,
                    negative_dust: evo.negative_dust,
                    steps: evo.steps_taken,
                    times_s: evo.times.clone(),
                    mean_photon: evo.mean_photon.clone(),
                    distribution: evo.final_state.probs().to_vec(),
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TrajectoryPayload {
    config: ConfigEcho,
    seed: u64,
    rng: &'static str,
    atoms_simulated: u64,
    events: usize,
    collective_event_count: u64,
    end_time_s: f64,
    transit_time_s: f64,
    burn_in_s: f64,
    one_atom_event_fraction: f64,
    one_atom_event_probability: f64,
    atom_down_fraction: f64,
    tv_distance: Option<f64>,
}

pub fn trajectory(args: &TrajectoryArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = resolve_common(&args.common, &file)?;
    let spec = resolve_trajectory(args, &file)?;
    let record = trajectory::simulate(&run.cfg, spec.transit_time_s, spec.atoms, run.seed)?;
    let mut out = open_sink(run.out.as_deref())?;
    match run.format {
        OutputFormat::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(["time_s", "kind", "n_after"])?;
            for e in &record.events {
                w.write_record([
                    fmt_f64(e.time),
                    e.kind.label().to_string(),
                    e.photon_number_after.to_string(),
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let isolated = trajectory::one_atom_event_fraction(&record, spec.transit_time_s)?;
            let analytic =
                trajectory::one_atom_event_probability(run.cfg.pump_rate(), spec.transit_time_s)?;
            let down = trajectory::atom_outcome_fraction(&record, spec.burn_in_s)?;
            let tv_distance = if spec.compare_steady {
                let target = steady::steady_state(&run.cfg)?;
                let empirical =
                    trajectory::empirical_distribution(&record, run.cfg.n_max(), spec.burn_in_s)?;
                Some(empirical.total_variation_distance(&target))
            } else {
                None
            };
            write_json(
                &mut *out,
                &TrajectoryPayload {
                    config: ConfigEcho::new(&run.cfg),
                    seed: record.seed,
                    rng: trajectory::RNG_ALGORITHM,
                    atoms_simulated: record.atoms_simulated,
                    events: record.events.len(),
                    collective_event_count: record.collective_event_count,
                    end_time_s: record.end_time,
                    transit_time_s: spec.transit_time_s,
                    burn_in_s: spec.burn_in_s,
                    one_atom_event_fraction: isolated,
                    one_atom_event_probability: analytic,
                    atom_down_fraction: down,
                    tv_distance,
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ThermalPayload {
    config: ConfigEcho,
    nu: f64,
    mean: f64,
    variance: f64,
    distribution: Vec<f64>,
}

pub fn thermal(args: &ThermalArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = resolve_common(&args.common, &file)?;
    let dist = thermal_distribution(run.cfg.nu(), run.cfg.n_max())?;
    let stats = dist.statistics();
    let mut out = open_sink(run.out.as_deref())?;
    match run.format {
        OutputFormat::Csv => {
            {
                let mut w = csv_writer(&mut *out);
                w.write_record(["nu", "mean", "variance", "n_max"])?;
                w.write_record([
                    fmt_f64(run.cfg.nu()),
                    fmt_f64(stats.mean),
                    fmt_f64(stats.variance),
                    run.cfg.n_max().to_string(),
                ])?;
                w.flush()?;
            }
            out.write_all(b"\n")?;
            write_distribution_csv(&mut *out, &dist)?;
        }
        OutputFormat::Json => {
            write_json(
                &mut *out,
                &ThermalPayload {
                    config: ConfigEcho::new(&run.cfg),
                    nu: run.cfg.nu(),
                    mean: stats.mean,
                    variance: stats.variance,
                    distribution: dist.probs().to_vec(),
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TrappedRow {
    n: usize,
    q: u32,
    residual: f64,
}

#[derive(Serialize)]
struct TrappedPayload {
    config: ConfigEcho,
    tol: f64,
    trapped: Vec<TrappedRow>,
}

pub fn trapped(args: &TrappedArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = resolve_common(&args.common, &file)?;
    let tol = resolve_trapped_tol(args, &file);
    let states = steady::trapped_state_numbers(run.cfg.phi(), run.cfg.n_max(), tol)?;
    let mut out = open_sink(run.out.as_deref())?;
    match run.format {
        OutputFormat::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(["n", "q", "residual"])?;
            for s in &states {
                w.write_record([s.n.to_string(), s.q.to_string(), fmt_f64(s.residual)])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let rows = states
                .iter()
                .map(|s| TrappedRow {
                    n: s.n,
                    q: s.q,
                    residual: s.residual,
                })
                .collect();
            write_json(
                &mut *out,
                &TrappedPayload {
                    config: ConfigEcho::new(&run.cfg),
                    tol,
                    trapped: rows,
                },
            )?;
        }
    }
    Ok(())
}
