//! Operating point of the maser: cavity mode, damping, pump beam and the
//! Fock-space truncation used by every solver.

use crate::error::{MaserError, Result};

/// Default Fock-space truncation.
pub const DEFAULT_N_MAX: usize = 256;

/// Immutable operating point. Validated once at construction; accessors
/// document the units. Observables depend on the Rabi angle only through
/// even functions, so negating `phi` changes nothing downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaserConfig {
    omega: f64,
    pump_rate: f64,
    decay_rate: f64,
    nu: f64,
    phi: f64,
    n_max: usize,
}

impl MaserConfig {
    /// `omega`: mode frequency in rad/s. `pump_rate`: excited-atom arrival
    /// rate r in 1/s, `>= 0`. `decay_rate`: cavity energy decay rate A in
    /// 1/s, `> 0`. `nu`: reservoir photon number, `>= 0`. `phi`: accumulated
    /// Rabi angle in rad. `n_max`: Fock cutoff, `>= 1`.
    pub fn new(
        omega: f64,
        pump_rate: f64,
        decay_rate: f64,
        nu: f64,
        phi: f64,
        n_max: usize,
    ) -> Result<Self> {
        if !omega.is_finite() {
            return Err(MaserError::domain("omega", "must be finite"));
        }
        if !pump_rate.is_finite() || pump_rate < 0.0 {
            return Err(MaserError::domain("pump_rate", "must be finite and >= 0"));
        }
        if !decay_rate.is_finite() || decay_rate <= 0.0 {
            return Err(MaserError::domain("decay_rate", "must be finite and > 0"));
        }
        if !nu.is_finite() || nu < 0.0 {
            return Err(MaserError::domain("nu", "must be finite and >= 0"));
        }
        if !phi.is_finite() {
            return Err(MaserError::domain("phi", "must be finite"));
        }
        if n_max < 1 {
            return Err(MaserError::domain("n_max", "must be >= 1"));
        }
        Ok(Self {
            omega,
            pump_rate,
            decay_rate,
            nu,
            phi,
            n_max,
        })
    }

    /// Mode frequency, rad/s.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Excited-atom arrival rate r, 1/s.
    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    /// Cavity energy decay rate A, 1/s.
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Reservoir photon number at the mode frequency.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Accumulated Rabi angle per passage, rad.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Fock-space cutoff: states 0..=n_max are represented.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimensionless pump ratio r/A.
    pub fn pump_ratio(&self) -> f64 {
        self.pump_rate / self.decay_rate
    }

    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Self::new(
            self.omega,
            self.pump_rate,
            self.decay_rate,
            self.nu,
            phi,
            self.n_max,
        )
    }

    pub fn with_pump_ratio(&self, ratio: f64) -> Result<Self> {
        Self::new(
            self.omega,
            ratio * self.decay_rate,
            self.decay_rate,
            self.nu,
            self.phi,
            self.n_max,
        )
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Self::new(
            self.omega,
            self.pump_rate,
            self.decay_rate,
            self.nu,
            self.phi,
            n_max,
        )
    }
}

/// Cavity energy decay rate A = (omega / 2 pi) / Q in 1/s, from the mode
/// frequency (rad/s) and the quality factor.
pub fn decay_rate_from_q(omega: f64, quality_q: f64) -> Result<f64> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(MaserError::domain("omega", "must be finite and > 0"));
    }
    if !quality_q.is_finite() || quality_q <= 0.0 {
        return Err(MaserError::domain("quality_q", "must be finite and > 0"));
    }
    Ok(omega / (2.0 * std::f64::consts::PI) / quality_q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz(f: f64) -> f64 {
        2.0 * std::f64::consts::PI * f * 1e9
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MaserConfig::new(1.0, -1.0, 1.0, 0.0, 1.0, 8).is_err());
        assert!(MaserConfig::new(1.0, 0.0, 0.0, 0.0, 1.0, 8).is_err());
        assert!(MaserConfig::new(1.0, 0.0, 1.0, -0.1, 1.0, 8).is_err());
        assert!(MaserConfig::new(1.0, 0.0, 1.0, 0.0, f64::NAN, 8).is_err());
        assert!(MaserConfig::new(1.0, 0.0, 1.0, 0.0, 1.0, 0).is_err());
        assert!(MaserConfig::new(f64::INFINITY, 0.0, 1.0, 0.0, 1.0, 8).is_err());
    }

    #[test]
    fn decay_rate_from_quality_factor() {
        // 21.5 GHz mode: Q = 1e9 and 1e10 give 21.5/s and 2.15/s.
        let a9 = decay_rate_from_q(ghz(21.5), 1e9).unwrap();
        let a10 = decay_rate_from_q(ghz(21.5), 1e10).unwrap();
        assert!((a9 - 21.5).abs() < 1e-9);
        assert!((a10 - 2.15).abs() < 1e-10);
        assert!(decay_rate_from_q(0.0, 1e9).is_err());
        assert!(decay_rate_from_q(ghz(21.5), 0.0).is_err());
    }

    #[test]
    fn pump_ratio_is_r_over_a() {
        let cfg = MaserConfig::new(ghz(21.5), 430.0, 21.5, 0.15, 1.0, 64).unwrap();
        assert!((cfg.pump_ratio() - 20.0).abs() < 1e-12);
    }
}
