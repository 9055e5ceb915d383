//! Resonant passage of a single excited atom through the cavity mode.
//!
//! A passage is parameterized entirely by the accumulated Rabi angle
//! phi = integral of g(t) dt over the transit. An atom entering in the
//! upper state with n photons present leaves the joint system in
//!
//!   cos(phi sqrt(n+1)) |up, n>  -  i sin(phi sqrt(n+1)) |down, n+1>
//!
//! so the emission probability is sin^2(phi sqrt(n+1)). Tracing out the
//! atom turns one passage into the gain map
//!
//!   rho' = C rho C + S' rho S,   C = cos(phi sqrt(a a'))
//!
//! whose matrix elements are implemented in `gain_superoperator_full`.

use num_complex::Complex64;

use crate::dist::PhotonDistribution;
use crate::error::{MaserError, Result};
use crate::matrix::NumberStateMatrix;

/// Probability that may leak past the cutoff in a single kick before the
/// truncated result is rejected.
const KICK_LEAK_TOL: f64 = 1e-12;

/// Tolerance for admitting a dressed-basis eigenvalue.
const EIGENVALUE_TOL: f64 = 1e-12;

/// Joint-state amplitudes after one resonant passage that started in
/// |up, n>: `stay_up` multiplies |up, n>, `emit_down` multiplies
/// |down, n+1>. The pair has unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageAmplitudes {
    pub stay_up: f64,
    pub emit_down: Complex64,
}

/// Amplitudes (cos(phi sqrt(n+1)), -i sin(phi sqrt(n+1))) for a passage
/// beginning in the upper state with `n` photons present.
pub fn passage_amplitudes(n: usize, phi: f64) -> PassageAmplitudes {
    let angle = phi * ((n + 1) as f64).sqrt();
    PassageAmplitudes {
        stay_up: angle.cos(),
        emit_down: Complex64::new(0.0, -angle.sin()),
    }
}

/// sin^2(phi sqrt(n+1)): chance that the atom deposits its excitation.
pub fn emission_probability(n: usize, phi: f64) -> f64 {
    let s = (phi * ((n + 1) as f64).sqrt()).sin();
    s * s
}

/// Phase factor exp(i phi gamma) acquired by the dressed state with
/// eigenvalue `gamma`. Admissible eigenvalues are 0 and +-sqrt(n+1) for
/// integer n >= 0, within 1e-12; anything else is rejected.
pub fn dressed_phase(gamma: f64, phi: f64) -> Result<Complex64> {
    let a = gamma.abs();
    let admissible = if a <= EIGENVALUE_TOL {
        true
    } else {
        let k = (a * a).round();
        k >= 1.0 && (a - k.sqrt()).abs() <= EIGENVALUE_TOL
    };
    if !admissible {
        return Err(MaserError::domain(
            "gamma",
            format!("{gamma} is not 0 or +-sqrt(n+1) within 1e-12"),
        ));
    }
    Ok(Complex64::from_polar(1.0, phi * gamma))
}

/// Coupling profile g(t) seen by an atom crossing a cavity of length
/// `length` at speed `speed`. Sample times must be strictly increasing;
/// samples outside the mode may be zero but never negative.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiProfile {
    times: Vec<f64>,
    values: Vec<f64>,
    length: f64,
    speed: f64,
}

impl RabiProfile {
    pub fn new(times: Vec<f64>, values: Vec<f64>, length: f64, speed: f64) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(MaserError::domain(
                "times",
                "times and values must be non-empty and equal length",
            ));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(MaserError::domain("times", "must be finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MaserError::domain("times", "must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MaserError::domain("values", "must be finite and >= 0"));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(MaserError::domain("length", "must be finite and > 0"));
        }
        if !speed.is_finite() || speed <= 0.0 {
            return Err(MaserError::domain("speed", "must be finite and > 0"));
        }
        Ok(Self {
            times,
            values,
            length,
            speed,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cavity length, m.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Atom speed, m/s.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Transit time L/v, s.
    pub fn transit_time(&self) -> f64 {
        self.length / self.speed
    }
}

/// Accumulated angle and the matching average coupling of one transit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiAngle {
    /// Average coupling g_bar = phi v / L, rad/s.
    pub g_bar: f64,
    /// Accumulated Rabi angle phi = integral g dt, rad.
    pub phi: f64,
}

/// Trapezoid quadrature of g(t) over the sampled transit. Needs at least
/// two samples to span an interval.
pub fn effective_rabi_angle(profile: &RabiProfile) -> Result<RabiAngle> {
    let t = profile.times();
    let g = profile.values();
    if t.len() < 2 {
        return Err(MaserError::domain(
            "profile",
            "needs at least 2 samples to integrate",
        ));
    }
    let mut phi = 0.0;
    for i in 1..t.len() {
        phi += 0.5 * (g[i] + g[i - 1]) * (t[i] - t[i - 1]);
    }
    Ok(RabiAngle {
        g_bar: phi * profile.speed() / profile.length(),
        phi,
    })
}

/// One passage applied to a diagonal field state:
/// p'(n) = cos^2(phi sqrt(n+1)) p(n) + sin^2(phi sqrt(n)) p(n-1).
/// Fails when more than 1e-12 of probability would leak past the cutoff.
pub fn pump_kick_up(dist: &PhotonDistribution, phi: f64) -> Result<PhotonDistribution> {
    let p = dist.probs();
    let n_max = dist.n_max();
    let leak = emission_probability(n_max, phi) * p[n_max];
    if leak > KICK_LEAK_TOL {
        return Err(MaserError::truncation(
            n_max,
            format!("pump kick would move {leak:.3e} past the cutoff"),
        ));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let stay = (1.0 - emission_probability(n, phi)) * p[n];
        let gain = if n > 0 {
            emission_probability(n - 1, phi) * p[n - 1]
        } else {
            0.0
        };
        out.push(stay + gain);
    }
    Ok(PhotonDistribution::from_raw(out))
}

/// One passage of an atom entering in the lower state (absorption):
/// p'(n) = cos^2(phi sqrt(n)) p(n) + sin^2(phi sqrt(n+1)) p(n+1).
/// Mass moves downward only, so no truncation can occur.
pub fn pump_kick_down(dist: &PhotonDistribution, phi: f64) -> PhotonDistribution {
    let p = dist.probs();
    let n_max = dist.n_max();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        // cos^2(phi sqrt(n)) via the n-1 emission angle; n = 0 keeps all.
        let stay = if n > 0 {
            (1.0 - emission_probability(n - 1, phi)) * p[n]
        } else {
            p[0]
        };
        let gain = if n < n_max {
            emission_probability(n, phi) * p[n + 1]
        } else {
            0.0
        };
        out.push(stay + gain);
    }
    PhotonDistribution::from_raw(out)
}

/// Raw gain map on row-major entries, shared with the master equation:
/// rho'(n,m) = cos(phi sqrt(n+1)) rho(n,m) cos(phi sqrt(m+1))
///           + sin(phi sqrt(n))   rho(n-1,m-1) sin(phi sqrt(m)).
pub(crate) fn gain_map_raw(data: &[Complex64], dim: usize, phi: f64) -> Vec<Complex64> {
    let mut cos_t = Vec::with_capacity(dim + 1);
    let mut sin_t = Vec::with_capacity(dim + 1);
    for k in 0..=dim {
        let angle = phi * (k as f64).sqrt();
        cos_t.push(angle.cos());
        sin_t.push(angle.sin());
    }
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        for m in 0..dim {
            // Assembling each coefficient as one real scalar keeps the
            // output Hermitian to the last bit, not just to rounding.
            let mut v = (cos_t[n + 1] * cos_t[m + 1]) * data[n * dim + m];
            if n > 0 && m > 0 {
                v += (sin_t[n] * sin_t[m]) * data[(n - 1) * dim + (m - 1)];
            }
            out[n * dim + m] = v;
        }
    }
    out
}

/// One passage applied to a full density matrix. Preserves trace and
/// Hermiticity; on diagonal input it reduces to `pump_kick_up`. Fails on
/// the same cutoff-leak condition, tested on the diagonal.
pub fn gain_superoperator_full(rho: &NumberStateMatrix, phi: f64) -> Result<NumberStateMatrix> {
    let dim = rho.dim();
    let n_max = rho.n_max();
    let leak = emission_probability(n_max, phi) * rho.entry(n_max, n_max).re;
    if leak > KICK_LEAK_TOL {
        return Err(MaserError::truncation(
            n_max,
            format!("gain map would move {leak:.3e} past the cutoff"),
        ));
    }
    let out = gain_map_raw(rho.entries(), dim, phi);
    Ok(NumberStateMatrix::from_raw(dim, out))
}
