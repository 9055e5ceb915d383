//! Steady state of the pump-damping balance and its observables.
//!
//! The stationary distribution satisfies detailed balance across every
//! ladder boundary: A(nu+1) n p(n) = [r sin^2(phi sqrt n) + A nu n] p(n-1).
//! Two independent routes are implemented. `steady_state` evaluates the
//! closed product
//!
//!   p(n) = p(0) prod_{k=1..n} [ nu/(nu+1) + (r/A) sin^2(phi sqrt k) / (k (nu+1)) ]
//!
//! in the log domain with an exact-zero short circuit, so a factor that is
//! exactly zero (a trapped photon number at nu = 0) truncates the support
//! exactly instead of underflowing. `recurrence_steady_state` runs the
//! balance recurrence forward in the linear domain with overflow rescaling.
//! Both reject results whose cutoff entry is not negligible, after
//! escalating the cutoff by doubling.

use crate::config::MaserConfig;
use crate::dist::{DistributionStats, PhotonDistribution};
use crate::error::{MaserError, Result};
use crate::jcm::emission_probability;

/// The cutoff entry must stay below this fraction of the peak entry.
const TAIL_GUARD: f64 = 1e-12;

/// Cutoff escalation stops here.
const ESCALATION_CAP: usize = 4096;

/// Rescale threshold for the linear-domain recurrence.
const RESCALE_LIMIT: f64 = 1e250;

/// Default residual tolerance when listing trapped photon numbers.
pub const DEFAULT_TRAPPED_TOL: f64 = 1e-9;

/// Steady-state summary: the distribution itself, its moments, the worst
/// detailed-balance defect (scaled by A(nu+1)), the chance that the next
/// atom exits de-excited, and the first photon number the pump cannot
/// cross when the reservoir is empty.
#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    pub distribution: PhotonDistribution,
    pub stats: DistributionStats,
    pub detailed_balance_residual: f64,
    pub atom_down_probability: f64,
    pub trapped_below: Option<usize>,
}

/// A photon number n with phi sqrt(n+1) within `residual` of q pi: an
/// atom entering above n photons can never emit into the n+1 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrappedState {
    pub n: usize,
    pub q: u32,
    pub residual: f64,
}

/// Exit-state probabilities for one atom crossing a cavity holding `dist`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomExitStatistics {
    pub p_down: f64,
    pub p_up: f64,
}

fn solve_with_escalation(
    cfg: &MaserConfig,
    weights: impl Fn(&MaserConfig, usize) -> Vec<f64>,
) -> Result<PhotonDistribution> {
    let mut n_max = cfg.n_max();
    loop {
        let p = PhotonDistribution::from_raw(weights(cfg, n_max))
            .normalized()
            .expect("steady-state weights always carry mass at the peak");
        let peak = p.probs().iter().fold(0.0f64, |m, v| m.max(*v));
        if p.get(n_max) < TAIL_GUARD * peak {
            return Ok(p);
        }
        if n_max >= ESCALATION_CAP {
            return Err(MaserError::truncation(
                n_max,
                format!(
                    "cutoff entry {:.3e} of peak {:.3e} is not negligible even at the escalation cap",
                    p.get(n_max),
                    peak
                ),
            ));
        }
        n_max = (n_max * 2).min(ESCALATION_CAP);
    }
}

fn product_weights(cfg: &MaserConfig, n_max: usize) -> Vec<f64> {
    let nu = cfg.nu();
    let ratio = cfg.pump_ratio();
    let phi = cfg.phi();
    let mut log_w = Vec::with_capacity(n_max + 1);
    log_w.push(0.0f64);
    for k in 1..=n_max {
        let s = (phi * (k as f64).sqrt()).sin();
        let f = nu / (nu + 1.0) + ratio * (s * s) / (k as f64 * (nu + 1.0));
        if f == 0.0 {
            // Exact zero: the ladder ends here, everything above is
            // unreachable and must be exactly zero, not merely small.
            break;
        }
        log_w.push(log_w[k - 1] + f.ln());
    }
    let peak = log_w.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let mut w: Vec<f64> = log_w.iter().map(|l| (l - peak).exp()).collect();
    w.resize(n_max + 1, 0.0);
    w
}

fn recurrence_weights(cfg: &MaserConfig, n_max: usize) -> Vec<f64> {
    let r = cfg.pump_rate();
    let a = cfg.decay_rate();
    let nu = cfg.nu();
    let phi = cfg.phi();
    let mut w = Vec::with_capacity(n_max + 1);
    w.push(1.0f64);
    let mut cur = 1.0f64;
    for k in 1..=n_max {
        let s = (phi * (k as f64).sqrt()).sin();
        let up = r * (s * s) + a * nu * k as f64;
        let down = a * (nu + 1.0) * k as f64;
        cur = cur * up / down;
        if cur == 0.0 {
            break;
        }
        if cur > RESCALE_LIMIT {
            for v in &mut w {
                *v /= RESCALE_LIMIT;
            }
            cur /= RESCALE_LIMIT;
        }
        w.push(cur);
    }
    w.resize(n_max + 1, 0.0);
    w
}

/// Stationary photon distribution via the log-domain product form.
/// Escalates the cutoff by doubling (up to 4096) until the cutoff entry
/// is below 1e-12 of the peak, so the returned distribution may be longer
/// than `cfg.n_max()`.
pub fn steady_state(cfg: &MaserConfig) -> Result<PhotonDistribution> {
    solve_with_escalation(cfg, product_weights)
}

/// Stationary distribution via the forward detailed-balance recurrence in
/// the linear domain; an independent arithmetic route with the same
/// cutoff contract as `steady_state`.
pub fn recurrence_steady_state(cfg: &MaserConfig) -> Result<PhotonDistribution> {
    solve_with_escalation(cfg, recurrence_weights)
}

/// Worst violation of detailed balance over all ladder boundaries,
/// scaled by A(nu+1). Stationary distributions sit at rounding level;
/// anything else is far away.
pub fn detailed_balance_residual(dist: &PhotonDistribution, cfg: &MaserConfig) -> f64 {
    let p = dist.probs();
    let r = cfg.pump_rate();
    let a = cfg.decay_rate();
    let nu = cfg.nu();
    let phi = cfg.phi();
    let mut worst = 0.0f64;
    for n in 1..=dist.n_max() {
        let s = (phi * (n as f64).sqrt()).sin();
        let lhs = a * (nu + 1.0) * n as f64 * p[n];
        let rhs = (r * (s * s) + a * nu * n as f64) * p[n - 1];
        worst = worst.max((lhs - rhs).abs());
    }
    worst / (a * (nu + 1.0))
}

/// Photon numbers n <= n_max with phi sqrt(n+1) within `tol` of a
/// multiple of pi, listed in ascending order. `phi` must be nonzero
/// (only its magnitude matters); `tol` must lie in (0, 0.1].
pub fn trapped_state_numbers(phi: f64, n_max: usize, tol: f64) -> Result<Vec<TrappedState>> {
    if !phi.is_finite() || phi == 0.0 {
        return Err(MaserError::domain("phi", "must be finite and nonzero"));
    }
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(MaserError::domain("tol", "must lie in (0, 0.1]"));
    }
    let phi = phi.abs();
    let mut out = Vec::new();
    for n in 0..=n_max {
        let x = phi * ((n + 1) as f64).sqrt();
        let q = (x / std::f64::consts::PI).round();
        if q >= 1.0 {
            let residual = (x - q * std::f64::consts::PI).abs();
            if residual < tol {
                out.push(TrappedState {
                    n,
                    q: q as u32,
                    residual,
                });
            }
        }
    }
    Ok(out)
}

/// Probability that the next atom leaves de-excited (and its complement)
/// given the field distribution it encounters. Assumes `dist` normalized.
pub fn atom_exit_statistics(dist: &PhotonDistribution, phi: f64) -> AtomExitStatistics {
    let p_down: f64 = dist
        .probs()
        .iter()
        .enumerate()
        .map(|(n, p)| p * emission_probability(n, phi))
        .sum();
    AtomExitStatistics {
        p_down,
        p_up: 1.0 - p_down,
    }
}

/// Full steady-state summary at one operating point.
pub fn steady_report(cfg: &MaserConfig) -> Result<SteadyStateReport> {
    let distribution = steady_state(cfg)?;
    let stats = distribution.statistics();
    let residual = detailed_balance_residual(&distribution, cfg);
    let p_down = atom_exit_statistics(&distribution, cfg.phi()).p_down;
    // With an empty reservoir the first trapped rung bounds the support.
    let trapped_below = if cfg.nu() == 0.0 && cfg.phi() != 0.0 {
        trapped_state_numbers(cfg.phi(), distribution.n_max(), DEFAULT_TRAPPED_TOL)
            .map(|v| v.first().map(|t| t.n))
            .unwrap_or(None)
    } else {
        None
    };
    Ok(SteadyStateReport {
        distribution,
        stats,
        detailed_balance_residual: residual,
        atom_down_probability: p_down,
        trapped_below,
    })
}

/// Which parameter a scan sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    Phi,
    PumpRatio,
}

/// One scan row; failures (for example cutoff escalation exhausted at a
/// pathological point) stay in their row instead of aborting the scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub value: f64,
    pub report: Result<SteadyStateReport>,
}

/// Sweeps `axis` over `values` with everything else taken from `cfg`.
pub fn pump_scan(cfg: &MaserConfig, axis: ScanAxis, values: &[f64]) -> Result<Vec<ScanPoint>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MaserError::domain("values", "must be finite"));
    }
    if axis == ScanAxis::PumpRatio && values.iter().any(|v| *v < 0.0) {
        return Err(MaserError::domain("values", "pump ratio must be >= 0"));
    }
    Ok(values
        .iter()
        .map(|&value| {
            let report = match axis {
                ScanAxis::Phi => cfg.with_phi(value),
                ScanAxis::PumpRatio => cfg.with_pump_ratio(value),
            }
            .and_then(|point| steady_report(&point));
            ScanPoint { value, report }
        })
        .collect())
}
