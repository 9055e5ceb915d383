//! Stochastic trajectories of the photon number under a beam of excited
//! atoms and a thermal reservoir.
//!
//! Between atoms the photon number is a birth-death jump process with
//! loss rate A(nu+1)n and gain rate A nu (n+1), sampled exactly (draw the
//! next jump time, draw the direction, discard the overshoot past the
//! next deadline). Each atom arrives after an exponential interarrival
//! time and kicks the field instantaneously: with probability
//! sin^2(phi sqrt(n+1)) it leaves de-excited and deposits a photon.

use crate::config::MaserConfig;
use crate::dist::PhotonDistribution;
use crate::error::{MaserError, Result};
use crate::jcm::emission_probability;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Generator behind every seeded simulation in this crate.
pub const RNG_ALGORITHM: &str = "chacha12";

/// What happened at one instant of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// An atom enters the cavity.
    AtomArrival,
    /// The atom leaves still excited; the field is unchanged.
    AtomExitUp,
    /// The atom leaves de-excited; the field gained its photon.
    AtomExitDown,
    /// The reservoir absorbed a photon.
    ReservoirLoss,
    /// A thermal photon entered from the reservoir.
    ReservoirGain,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::AtomArrival => "arrival",
            EventKind::AtomExitUp => "exit-up",
            EventKind::AtomExitDown => "exit-down",
            EventKind::ReservoirLoss => "loss",
            EventKind::ReservoirGain => "gain",
        }
    }
}

/// One timestamped event. Arrival and exit of the same atom share a
/// timestamp because the passage is treated as instantaneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub photon_number_after: usize,
}

/// When a simulation ends: after a fixed number of atoms have crossed,
/// or at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    Atoms(u64),
    Time(f64),
}

/// A complete simulated history plus the bookkeeping needed to analyze
/// it: `collective_event_count` is the number of maximal runs of two or
/// more consecutive atoms whose arrival gaps are all below the transit
/// time, counted as the run is detected.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub events: Vec<Event>,
    pub seed: u64,
    pub initial_photon: usize,
    pub atoms_simulated: u64,
    pub collective_event_count: u64,
    pub end_time: f64,
}

impl TrajectoryRecord {
    /// Arrival times of every atom, in order.
    pub fn arrival_times(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::AtomArrival)
            .map(|e| e.time)
            .collect()
    }
}

/// One exponential interarrival time at the given rate.
pub fn sample_interarrival(rate: f64, rng: &mut impl Rng) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(MaserError::domain("rate", "must be finite and positive"));
    }
    let u: f64 = rng.random();
    // -ln(1 - u) without cancellation near u = 0.
    Ok(-(-u).ln_1p() / rate)
}

/// Probability that an atom crossing in time `transit_time` sees no other
/// atom inside the cavity: exp(-2 pump_rate transit_time) for a Poisson
/// beam (no arrival in the transit window on either side).
pub fn one_atom_event_probability(pump_rate: f64, transit_time: f64) -> Result<f64> {
    if !pump_rate.is_finite() || pump_rate < 0.0 {
        return Err(MaserError::domain("pump_rate", "must be finite and >= 0"));
    }
    if !transit_time.is_finite() || transit_time < 0.0 {
        return Err(MaserError::domain(
            "transit_time",
            "must be finite and >= 0",
        ));
    }
    Ok((-2.0 * pump_rate * transit_time).exp())
}

/// Fraction of recorded atoms with no neighbor arrival within
/// `transit_time` on either side; the empirical counterpart of
/// `one_atom_event_probability`.
pub fn one_atom_event_fraction(record: &TrajectoryRecord, transit_time: f64) -> Result<f64> {
    if !transit_time.is_finite() || transit_time <= 0.0 {
        return Err(MaserError::domain(
            "transit_time",
            "must be finite and positive",
        ));
    }
    let arrivals = record.arrival_times();
    if arrivals.is_empty() {
        return Err(MaserError::domain("record", "contains no atoms"));
    }
    let isolated = arrivals
        .iter()
        .enumerate()
        .filter(|&(i, &t)| {
            let clear_before = i == 0 || t - arrivals[i - 1] >= transit_time;
            let clear_after = i + 1 == arrivals.len() || arrivals[i + 1] - t >= transit_time;
            clear_before && clear_after
        })
        .count();
    Ok(isolated as f64 / arrivals.len() as f64)
}

/// Simulates `n_atoms` atoms through an initially empty cavity.
pub fn simulate(
    cfg: &MaserConfig,
    transit_time: f64,
    n_atoms: u64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    if n_atoms == 0 {
        return Err(MaserError::domain("n_atoms", "must be >= 1"));
    }
    simulate_with(cfg, 0, transit_time, StopRule::Atoms(n_atoms), seed)
}

/// Simulates from an arbitrary initial photon number until `stop`.
/// Stopping on an atom count requires a positive pump rate; the photon
/// number must stay below `cfg.n_max()` throughout.
pub fn simulate_with(
    cfg: &MaserConfig,
    initial_photon: usize,
    transit_time: f64,
    stop: StopRule,
    seed: u64,
) -> Result<TrajectoryRecord> {
    if !transit_time.is_finite() || transit_time <= 0.0 {
        return Err(MaserError::domain(
            "transit_time",
            "must be finite and positive",
        ));
    }
    if initial_photon >= cfg.n_max() {
        return Err(MaserError::domain(
            "initial_photon",
            "must sit below the photon-number cutoff",
        ));
    }
    match stop {
        StopRule::Atoms(k) => {
            if k == 0 {
                return Err(MaserError::domain("stop", "atom count must be >= 1"));
            }
            if cfg.pump_rate() == 0.0 {
                return Err(MaserError::domain(
                    "stop",
                    "an atom-count stop needs a positive pump rate",
                ));
            }
        }
        StopRule::Time(t) => {
            if !t.is_finite() || t <= 0.0 {
                return Err(MaserError::domain(
                    "stop",
                    "stop time must be finite and positive",
                ));
            }
        }
    }

    let r = cfg.pump_rate();
    let a = cfg.decay_rate();
    let nu = cfg.nu();
    let phi = cfg.phi();
    let n_max = cfg.n_max();
    let horizon = match stop {
        StopRule::Time(t) => t,
        StopRule::Atoms(_) => f64::INFINITY,
    };

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut n = initial_photon;
    let mut t = 0.0f64;
    let mut events = Vec::new();
    let mut atoms: u64 = 0;
    let mut collective: u64 = 0;
    let mut prev_arrival: Option<f64> = None;
    let mut in_cluster = false;
    let end_time;

    loop {
        if let StopRule::Atoms(k) = stop {
            if atoms >= k {
                end_time = t;
                break;
            }
        }
        let next_atom = if r > 0.0 {
            t + sample_interarrival(r, &mut rng)?
        } else {
            f64::INFINITY
        };
        let deadline = next_atom.min(horizon);

        // Reservoir jumps until the deadline; overshoots are discarded,
        // which is exact for exponential waiting times.
        loop {
            let loss = a * (nu + 1.0) * n as f64;
            let gain = a * nu * (n as f64 + 1.0);
            let total = loss + gain;
            if total == 0.0 {
                break;
            }
            let dt = sample_interarrival(total, &mut rng)?;
            if t + dt >= deadline {
                break;
            }
            t += dt;
            if rng.random::<f64>() < loss / total {
                n -= 1;
                events.push(Event {
                    time: t,
                    kind: EventKind::ReservoirLoss,
                    photon_number_after: n,
                });
            } else {
                n += 1;
                if n >= n_max {
                    return Err(MaserError::truncation(
                        n_max,
                        format!("photon number reached the cutoff at t = {t:.6e} s"),
                    ));
                }
                events.push(Event {
                    time: t,
                    kind: EventKind::ReservoirGain,
                    photon_number_after: n,
                });
            }
        }

        if next_atom >= horizon {
            end_time = horizon;
            break;
        }

        t = next_atom;
        atoms += 1;
        if let Some(prev) = prev_arrival {
            if t - prev < transit_time {
                if !in_cluster {
                    collective += 1;
                    in_cluster = true;
                }
            } else {
                in_cluster = false;
            }
        }
        prev_arrival = Some(t);
        events.push(Event {
            time: t,
            kind: EventKind::AtomArrival,
            photon_number_after: n,
        });
        if rng.random::<f64>() < emission_probability(n, phi) {
            n += 1;
            if n >= n_max {
                return Err(MaserError::truncation(
                    n_max,
                    format!("photon number reached the cutoff at t = {t:.6e} s"),
                ));
            }
            events.push(Event {
                time: t,
                kind: EventKind::AtomExitDown,
                photon_number_after: n,
            });
        } else {
            events.push(Event {
                time: t,
                kind: EventKind::AtomExitUp,
                photon_number_after: n,
            });
        }
    }

    Ok(TrajectoryRecord {
        events,
        seed,
        initial_photon,
        atoms_simulated: atoms,
        collective_event_count: collective,
        end_time,
    })
}

/// Time-weighted photon-number distribution over (burn_in, end_time].
/// Fails if the record visits a photon number above `n_max` or if the
/// burn-in consumes the whole record.
pub fn empirical_distribution(
    record: &TrajectoryRecord,
    n_max: usize,
    burn_in: f64,
) -> Result<PhotonDistribution> {
    if !burn_in.is_finite() || burn_in < 0.0 {
        return Err(MaserError::domain("burn_in", "must be finite and >= 0"));
    }
    if burn_in >= record.end_time {
        return Err(MaserError::domain("burn_in", "consumes the whole record"));
    }
    let mut weights = vec![0.0f64; n_max + 1];
    let mut cur_n = record.initial_photon;
    let mut cur_t = 0.0f64;
    let segment_ends = record
        .events
        .iter()
        .map(|e| (e.time, Some(e.photon_number_after)))
        .chain(std::iter::once((record.end_time, None)));
    for (time, next_n) in segment_ends {
        if cur_n > n_max {
            return Err(MaserError::domain(
                "n_max",
                format!("record visits photon number {cur_n} above the cutoff"),
            ));
        }
        let from = cur_t.max(burn_in);
        if time > from {
            weights[cur_n] += time - from;
        }
        cur_t = time;
        if let Some(next) = next_n {
            cur_n = next;
        }
    }
    PhotonDistribution::new(weights)?.normalized()
}

/// Fraction of atoms arriving at or after `burn_in` that exit de-excited.
pub fn atom_outcome_fraction(record: &TrajectoryRecord, burn_in: f64) -> Result<f64> {
    if !burn_in.is_finite() || burn_in < 0.0 {
        return Err(MaserError::domain("burn_in", "must be finite and >= 0"));
    }
    let mut down = 0u64;
    let mut total = 0u64;
    for event in &record.events {
        if event.time < burn_in {
            continue;
        }
        match event.kind {
            EventKind::AtomExitDown => {
                down += 1;
                total += 1;
            }
            EventKind::AtomExitUp => total += 1,
            _ => {}
        }
    }
    if total == 0 {
        return Err(MaserError::domain("burn_in", "leaves no atoms to count"));
    }
    Ok(down as f64 / total as f64)
}
