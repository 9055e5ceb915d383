//! Field master equation between atom passages and its integration.
//!
//! The generator combines three parts: free rotation at the mode
//! frequency, the pump gain at rate r (one passage map per arriving
//! excited atom), and damping into a reservoir holding nu photons:
//!
//!   d rho/dt = -i omega [N, rho] + r (gain(rho) - rho)
//!              - (A/2)(nu+1) (N rho - 2 a rho a' + rho N)
//!              - (A/2) nu    (a a' rho - 2 a' rho a + rho a a')
//!
//! On diagonal states this reduces to a birth-death equation for p(n),
//! implemented in flux form so that probability bookkeeping telescopes
//! instead of accumulating rounding. Integration is classic fixed-order
//! RK4 under step-doubling error control: one full step is compared with
//! two half steps, the difference scaled by 1/15 estimates the local
//! error, and the pair is retried with a smaller step on failure.

use num_complex::Complex64;

use crate::config::MaserConfig;
use crate::dist::PhotonDistribution;
use crate::error::{MaserError, Result};
use crate::jcm::{emission_probability, gain_map_raw};
use crate::matrix::NumberStateMatrix;

/// Dimensionless weight of probability flux past the cutoff above which
/// the truncated generator is rejected.
const TRUNCATION_GUARD: f64 = 1e-10;

/// Step ceiling applied when the caller does not override it.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Admissible relative tolerance window for the adaptive integrator.
pub const REL_TOL_RANGE: (f64, f64) = (1e-12, 1e-3);

/// Which frame the full-matrix generator works in. `Rotating` drops the
/// free term (it only spins coherences at the mode frequency), keeping
/// the integration free of the optical-frequency time scale; `Lab` keeps
/// it for tests that watch the mean field rotate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Rotating,
}

/// Adaptive-stepper knobs beyond the required relative tolerance.
#[derive(Debug, Clone, Copy)]
pub struct StepperOptions {
    pub rel_tol: f64,
    pub max_steps: u64,
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Result of integrating a diagonal state. `times` and `mean_photon` hold
/// one entry per accepted step including t = 0. `trace_drift` is the
/// distance of the raw final total from 1 before the explicit
/// renormalization at this output boundary; `negative_dust` is the most
/// negative raw entry (0 when none), clamped to zero in `final_state`.
#[derive(Debug, Clone)]
pub struct DiagonalEvolution {
    pub final_state: PhotonDistribution,
    pub times: Vec<f64>,
    pub mean_photon: Vec<f64>,
    pub steps_taken: u64,
    pub trace_drift: f64,
    pub negative_dust: f64,
}

/// Result of integrating a full density matrix; fields as in
/// `DiagonalEvolution` plus the mean-field magnitude |<a>| per step.
#[derive(Debug, Clone)]
pub struct FullEvolution {
    pub final_state: NumberStateMatrix,
    pub times: Vec<f64>,
    pub mean_photon: Vec<f64>,
    pub mean_field_magnitude: Vec<f64>,
    pub steps_taken: u64,
    pub trace_drift: f64,
}

/// Birth-death right-hand side for a diagonal state:
/// dp/dt(n) = r sin^2(phi sqrt n) p(n-1) + A(nu+1)(n+1) p(n+1)
///          + A nu n p(n-1) - r sin^2(phi sqrt(n+1)) p(n)
///          - A(nu+1) n p(n) - A nu (n+1) p(n).
/// Rejects states whose cutoff entry would leak more than the guard.
pub fn diagonal_rhs(dist: &PhotonDistribution, cfg: &MaserConfig) -> Result<Vec<f64>> {
    diagonal_rhs_raw(dist.probs(), cfg)
}

fn check_diagonal_guard(top: f64, n_max: usize, cfg: &MaserConfig) -> Result<()> {
    let pump_leak = if cfg.pump_rate() > 0.0 {
        emission_probability(n_max, cfg.phi()) * top
    } else {
        0.0
    };
    let thermal_leak = cfg.nu() * (n_max as f64 + 1.0) * top;
    if pump_leak > TRUNCATION_GUARD || thermal_leak > TRUNCATION_GUARD {
        return Err(MaserError::truncation(
            n_max,
            format!(
                "cutoff occupation {top:.3e} leaks (pump {pump_leak:.3e}, thermal {thermal_leak:.3e})"
            ),
        ));
    }
    Ok(())
}

fn diagonal_rhs_raw(p: &[f64], cfg: &MaserConfig) -> Result<Vec<f64>> {
    let n_max = p.len() - 1;
    check_diagonal_guard(p[n_max], n_max, cfg)?;
    let r = cfg.pump_rate();
    let a = cfg.decay_rate();
    let nu = cfg.nu();
    let phi = cfg.phi();

    // Upward flux across each n -> n+1 boundary; the flux out of n_max is
    // the (guarded) leak into the discarded part of the ladder.
    let mut dp = vec![0.0; n_max + 1];
    let mut flux_below = 0.0;
    for n in 0..=n_max {
        let up = (r * emission_probability(n, phi) + a * nu * (n as f64 + 1.0)) * p[n];
        let down = if n < n_max {
            a * (nu + 1.0) * (n as f64 + 1.0) * p[n + 1]
        } else {
            0.0
        };
        let flux_above = up - down;
        dp[n] = flux_below - flux_above;
        flux_below = flux_above;
    }
    Ok(dp)
}

/// Full generator on row-major entries. Returns the raw derivative of
/// every matrix element; Hermiticity of the output is exact because every
/// coefficient is assembled as one real scalar before it multiplies a
/// matrix entry.
pub fn full_rhs(
    rho: &NumberStateMatrix,
    cfg: &MaserConfig,
    frame: Frame,
) -> Result<Vec<Complex64>> {
    full_rhs_raw(rho.entries(), rho.dim(), cfg, frame)
}

fn full_rhs_raw(
    data: &[Complex64],
    dim: usize,
    cfg: &MaserConfig,
    frame: Frame,
) -> Result<Vec<Complex64>> {
    let n_max = dim - 1;
    check_diagonal_guard(data[n_max * dim + n_max].re, n_max, cfg)?;
    let r = cfg.pump_rate();
    let a = cfg.decay_rate();
    let nu = cfg.nu();
    let omega = cfg.omega();

    let gain = gain_map_raw(data, dim, cfg.phi());
    let a_nu1 = a * (nu + 1.0);
    let a_nu = a * nu;

    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        for m in 0..dim {
            let idx = n * dim + m;
            let mut v = r * (gain[idx] - data[idx]);
            // Damping: out-rates on rho(n,m), feeding from the diagonals
            // one step up (emission into the reservoir) and one step down
            // (absorption from it).
            let out_rate = 0.5 * a_nu1 * (n + m) as f64 + 0.5 * a_nu * (n + m + 2) as f64;
            v -= out_rate * data[idx];
            if n < n_max && m < n_max {
                v += a_nu1 * (((n + 1) * (m + 1)) as f64).sqrt() * data[(n + 1) * dim + (m + 1)];
            }
            if n > 0 && m > 0 {
                v += a_nu * ((n * m) as f64).sqrt() * data[(n - 1) * dim + (m - 1)];
            }
            if frame == Frame::Lab && n != m {
                // -i omega (n - m) rho(n,m)
                let w = omega * (n as f64 - m as f64);
                v += Complex64::new(0.0, -w) * data[idx];
            }
            out[idx] = v;
        }
    }
    Ok(out)
}

/// Closed-form mean photon number of an unpumped cavity:
/// nu + (n0 - nu) exp(-A t).
pub fn unpumped_mean_number(n0: f64, cfg: &MaserConfig, t: f64) -> f64 {
    cfg.nu() + (n0 - cfg.nu()) * (-cfg.decay_rate() * t).exp()
}

/// Closed-form mean field of an unpumped cavity: the amplitude rotates at
/// the mode frequency and decays at half the energy rate,
/// alpha0 exp(-i omega t) exp(-A t / 2).
pub fn unpumped_mean_field(alpha0: Complex64, cfg: &MaserConfig, t: f64) -> Complex64 {
    alpha0 * Complex64::from_polar((-0.5 * cfg.decay_rate() * t).exp(), -cfg.omega() * t)
}

/// <a> = trace(a rho) = sum_n sqrt(n+1) rho(n+1, n).
pub fn mean_field(rho: &NumberStateMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..rho.n_max() {
        acc += ((n + 1) as f64).sqrt() * rho.entry(n + 1, n);
    }
    acc
}

// ---------------------------------------------------------------------------
// RK4 with step-doubling error control, shared by both state layouts.
// ---------------------------------------------------------------------------

trait OdeVec: Clone {
    /// self += c x
    fn axpy(&mut self, c: f64, x: &Self);
    fn max_abs(&self) -> f64;
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl OdeVec for Vec<f64> {
    fn axpy(&mut self, c: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += c * v;
        }
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl OdeVec for Vec<Complex64> {
    fn axpy(&mut self, c: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += c * v;
        }
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

fn rk4_step<S: OdeVec>(rhs: &mut impl FnMut(&S) -> Result<S>, y: &S, h: f64) -> Result<S> {
    let k1 = rhs(y)?;
    let mut stage = y.clone();
    stage.axpy(0.5 * h, &k1);
    let k2 = rhs(&stage)?;
    stage = y.clone();
    stage.axpy(0.5 * h, &k2);
    let k3 = rhs(&stage)?;
    stage = y.clone();
    stage.axpy(h, &k3);
    let k4 = rhs(&stage)?;
    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    Ok(out)
}

fn validate_time_and_tol(duration: f64, rel_tol: f64) -> Result<()> {
    if !duration.is_finite() || duration < 0.0 {
        return Err(MaserError::domain("duration", "must be finite and >= 0"));
    }
    let (lo, hi) = REL_TOL_RANGE;
    if !(rel_tol >= lo && rel_tol <= hi) {
        return Err(MaserError::domain(
            "rel_tol",
            format!("must lie in [{lo:.0e}, {hi:.0e}]"),
        ));
    }
    Ok(())
}

/// Core adaptive loop. `record` sees every accepted state including the
/// initial one. Returns the final state and the accepted-step count.
/// `max_dt` caps the step at the stability limit of the generator; on
/// quasi-stationary stretches the local error alone would let the step
/// grow past it, and the unstable modes then pump rounding dust into
/// otherwise empty entries before the error estimate can object.
fn integrate_adaptive<S: OdeVec>(
    y0: S,
    duration: f64,
    opts: StepperOptions,
    initial_dt: f64,
    max_dt: f64,
    rhs: &mut impl FnMut(&S) -> Result<S>,
    record: &mut impl FnMut(f64, &S),
) -> Result<(S, u64)> {
    record(0.0, &y0);
    if duration == 0.0 {
        return Ok((y0, 0));
    }
    let mut y = y0;
    let mut t = 0.0;
    let mut h = initial_dt.min(max_dt).min(duration);
    let mut attempts: u64 = 0;
    let mut accepted: u64 = 0;
    loop {
        if attempts >= opts.max_steps {
            return Err(MaserError::NonConvergence {
                max_steps: opts.max_steps,
                reached: t,
                target: duration,
            });
        }
        attempts += 1;
        let clamped = h >= duration - t;
        let h_try = if clamped { duration - t } else { h };

        let full = rk4_step(rhs, &y, h_try)?;
        let half = rk4_step(rhs, &y, 0.5 * h_try)?;
        let half2 = rk4_step(rhs, &half, 0.5 * h_try)?;

        // Step doubling: the half-step pair is one order better, so the
        // difference over 2^4 - 1 estimates its local error.
        let err = full.max_abs_diff(&half2) / 15.0;
        let scale = opts.rel_tol * y.max_abs().max(half2.max_abs()).max(f64::MIN_POSITIVE);
        let accept = err <= scale;
        if accept {
            y = half2;
            t = if clamped { duration } else { t + h_try };
            accepted += 1;
            record(t, &y);
            if t >= duration {
                return Ok((y, accepted));
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h = (h_try * factor).min(max_dt);
    }
}

fn diagonal_initial_dt(cfg: &MaserConfig, n_max: usize) -> f64 {
    0.1 / (cfg.decay_rate() * (cfg.nu() + 1.0) * (n_max as f64 + 1.0) + cfg.pump_rate())
}

/// Stability ceiling for explicit RK4 on the birth-death generator. The
/// spectrum is bounded by twice the fastest out-rate of any retained
/// state, and the real-axis stability interval ends near |lambda h| =
/// 2.8, so 1.25 over the fastest rate keeps every mode inside it.
fn diagonal_stability_dt(cfg: &MaserConfig, n_max: usize) -> f64 {
    let fastest = cfg.pump_rate()
        + cfg.decay_rate() * ((cfg.nu() + 1.0) * n_max as f64 + cfg.nu() * (n_max as f64 + 1.0));
    1.25 / fastest
}

/// As `diagonal_stability_dt` for the full generator: coherences damp at
/// the average of their diagonal rates, the pump contributes up to twice
/// its rate, and in the lab frame the free rotation of the farthest
/// coherence must be resolved as well.
fn full_stability_dt(cfg: &MaserConfig, n_max: usize, frame: Frame) -> f64 {
    let mut fastest = 2.0 * cfg.pump_rate()
        + cfg.decay_rate() * ((cfg.nu() + 1.0) * n_max as f64 + cfg.nu() * (n_max as f64 + 1.0));
    if frame == Frame::Lab {
        fastest += cfg.omega().abs() * n_max as f64;
    }
    1.25 / fastest
}

/// Finishes a diagonal integration: clamp rounding dust, report drift,
/// renormalize at this output boundary.
fn finish_diagonal(
    raw: Vec<f64>,
    times: Vec<f64>,
    mean_photon: Vec<f64>,
    steps: u64,
) -> DiagonalEvolution {
    let total: f64 = raw.iter().sum();
    let trace_drift = (total - 1.0).abs();
    let negative_dust = raw.iter().fold(0.0f64, |acc, v| acc.min(*v));
    let clamped: Vec<f64> = raw.into_iter().map(|v| v.max(0.0)).collect();
    let final_state = PhotonDistribution::from_raw(clamped)
        .normalized()
        .expect("integrated state keeps finite mass");
    DiagonalEvolution {
        final_state,
        times,
        mean_photon,
        steps_taken: steps,
        trace_drift,
        negative_dust,
    }
}

fn mean_of(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(n, v)| n as f64 * v).sum()
}

/// Integrates a diagonal state for `duration` seconds under step-doubling
/// control at `rel_tol` (within `REL_TOL_RANGE`). The distribution's own
/// cutoff governs the truncation.
pub fn integrate_diagonal(
    initial: &PhotonDistribution,
    cfg: &MaserConfig,
    duration: f64,
    rel_tol: f64,
) -> Result<DiagonalEvolution> {
    integrate_diagonal_with(
        initial,
        cfg,
        duration,
        StepperOptions {
            rel_tol,
            ..StepperOptions::default()
        },
    )
}

pub fn integrate_diagonal_with(
    initial: &PhotonDistribution,
    cfg: &MaserConfig,
    duration: f64,
    opts: StepperOptions,
) -> Result<DiagonalEvolution> {
    validate_time_and_tol(duration, opts.rel_tol)?;
    let mut times = Vec::new();
    let mut means = Vec::new();
    let mut rhs = |p: &Vec<f64>| diagonal_rhs_raw(p, cfg);
    let mut record = |t: f64, p: &Vec<f64>| {
        times.push(t);
        means.push(mean_of(p));
    };
    let (raw, steps) = integrate_adaptive(
        initial.probs().to_vec(),
        duration,
        opts,
        diagonal_initial_dt(cfg, initial.n_max()),
        diagonal_stability_dt(cfg, initial.n_max()),
        &mut rhs,
        &mut record,
    )?;
    Ok(finish_diagonal(raw, times, means, steps))
}

/// Fixed-step RK4 over `n_steps` equal steps, no error control. Used for
/// convergence-order measurements and predictable-cost sweeps.
pub fn integrate_diagonal_fixed(
    initial: &PhotonDistribution,
    cfg: &MaserConfig,
    duration: f64,
    n_steps: u32,
) -> Result<DiagonalEvolution> {
    if !duration.is_finite() || duration < 0.0 {
        return Err(MaserError::domain("duration", "must be finite and >= 0"));
    }
    if n_steps == 0 {
        return Err(MaserError::domain("n_steps", "must be >= 1"));
    }
    let mut rhs = |p: &Vec<f64>| diagonal_rhs_raw(p, cfg);
    let mut y = initial.probs().to_vec();
    let mut times = vec![0.0];
    let mut means = vec![mean_of(&y)];
    let h = duration / n_steps as f64;
    for i in 1..=n_steps {
        y = rk4_step(&mut rhs, &y, h)?;
        times.push(duration * i as f64 / n_steps as f64);
        means.push(mean_of(&y));
    }
    Ok(finish_diagonal(y, times, means, n_steps as u64))
}

/// Integrates a full density matrix; see `integrate_diagonal` for the
/// stepping contract. The final matrix is renormalized to unit trace at
/// this output boundary with the raw drift reported.
pub fn integrate_full(
    initial: &NumberStateMatrix,
    cfg: &MaserConfig,
    duration: f64,
    rel_tol: f64,
    frame: Frame,
) -> Result<FullEvolution> {
    integrate_full_with(
        initial,
        cfg,
        duration,
        StepperOptions {
            rel_tol,
            ..StepperOptions::default()
        },
        frame,
    )
}

pub fn integrate_full_with(
    initial: &NumberStateMatrix,
    cfg: &MaserConfig,
    duration: f64,
    opts: StepperOptions,
    frame: Frame,
) -> Result<FullEvolution> {
    validate_time_and_tol(duration, opts.rel_tol)?;
    let dim = initial.dim();
    let mut times = Vec::new();
    let mut means = Vec::new();
    let mut field_mags = Vec::new();
    let mut rhs = |d: &Vec<Complex64>| full_rhs_raw(d, dim, cfg, frame);
    let mut record = |t: f64, d: &Vec<Complex64>| {
        times.push(t);
        let mut mean = 0.0;
        for n in 0..dim {
            mean += n as f64 * d[n * dim + n].re;
        }
        means.push(mean);
        let mut field = Complex64::new(0.0, 0.0);
        for n in 0..dim - 1 {
            field += ((n + 1) as f64).sqrt() * d[(n + 1) * dim + n];
        }
        field_mags.push(field.norm());
    };
    let (raw, steps) = integrate_adaptive(
        initial.entries().to_vec(),
        duration,
        opts,
        diagonal_initial_dt(cfg, initial.n_max()),
        full_stability_dt(cfg, initial.n_max(), frame),
        &mut rhs,
        &mut record,
    )?;
    let trace: f64 = (0..dim).map(|n| raw[n * dim + n].re).sum();
    let trace_drift = (trace - 1.0).abs();
    if !(trace.is_finite() && trace > 0.0) {
        return Err(MaserError::domain(
            "final_state",
            format!("trace {trace:.6e} is not a physical state"),
        ));
    }
    let renormalized: Vec<Complex64> = raw.into_iter().map(|z| z / trace).collect();
    Ok(FullEvolution {
        final_state: NumberStateMatrix::from_raw(dim, renormalized),
        times,
        mean_photon: means,
        mean_field_magnitude: field_mags,
        steps_taken: steps,
        trace_drift,
    })
}
