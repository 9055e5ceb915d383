//! Thermal equilibrium of the cavity mode: the reservoir occupation number
//! at a given temperature and the geometric photon distribution it implies.

use crate::constants::{BOLTZMANN, HBAR};
use crate::dist::PhotonDistribution;
use crate::error::{MaserError, Result};

/// Bose-Einstein occupation 1 / (exp(hbar omega / kB T) - 1) of a mode at
/// `omega` rad/s in contact with a reservoir at `temperature_k` kelvin.
/// Underflows cleanly to 0 for temperatures far below the photon energy.
pub fn thermal_photon_number(temperature_k: f64, omega: f64) -> Result<f64> {
    if !temperature_k.is_finite() || temperature_k <= 0.0 {
        return Err(MaserError::domain(
            "temperature_k",
            "must be finite and > 0",
        ));
    }
    if !omega.is_finite() || omega <= 0.0 {
        return Err(MaserError::domain("omega", "must be finite and > 0"));
    }
    let x = HBAR * omega / (BOLTZMANN * temperature_k);
    Ok(1.0 / x.exp_m1())
}

/// Geometric distribution p(n) proportional to (nu/(nu+1))^n, normalized
/// over 0..=n_max. The truncated mean approaches `nu` once n_max covers
/// the thermal tail (n_max >= 40 (nu+1) puts the error below 1e-9).
pub fn thermal_distribution(nu: f64, n_max: usize) -> Result<PhotonDistribution> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(MaserError::domain("nu", "must be finite and >= 0"));
    }
    if n_max < 1 {
        return Err(MaserError::domain("n_max", "must be >= 1"));
    }
    let x = nu / (nu + 1.0);
    let mut probs = Vec::with_capacity(n_max + 1);
    let mut w = 1.0;
    for _ in 0..=n_max {
        probs.push(w);
        w *= x;
    }
    PhotonDistribution::from_raw(probs).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz(f: f64) -> f64 {
        2.0 * std::f64::consts::PI * f * 1e9
    }

    #[test]
    fn occupation_at_the_21_5_ghz_reference_points() {
        // Frozen oracle: exact SI constants, 60-digit evaluation.
        let nu_a = thermal_photon_number(0.5, ghz(21.5)).unwrap();
        let nu_b = thermal_photon_number(0.08, ghz(21.5)).unwrap();
        assert!((nu_a - 0.14545765499110030).abs() < 1e-12);
        assert!((nu_b - 2.5031433984324428e-6).abs() < 1e-18);
    }

    #[test]
    fn occupation_rejects_nonpositive_inputs() {
        assert!(thermal_photon_number(0.0, 1e9).is_err());
        assert!(thermal_photon_number(-1.0, 1e9).is_err());
        assert!(thermal_photon_number(0.5, 0.0).is_err());
        assert!(thermal_photon_number(f64::NAN, 1e9).is_err());
    }

    #[test]
    fn occupation_underflows_to_zero_at_extreme_ratio() {
        // hbar omega / kB T ~ 1e4: exp overflows, occupation is exactly 0.
        let nu = thermal_photon_number(1e-4, ghz(21.5) * 10.0).unwrap();
        assert_eq!(nu, 0.0);
    }

    #[test]
    fn zero_nu_is_the_vacuum() {
        let d = thermal_distribution(0.0, 16).unwrap();
        assert_eq!(d.get(0), 1.0);
        assert_eq!(d.probs()[1..], vec![0.0; 16]);
    }

    #[test]
    fn truncated_mean_error_shrinks_with_the_cutoff() {
        for &nu in &[0.15f64, 1.0, 2.0, 5.0] {
            let n_max = (40.0 * (nu + 1.0)).ceil() as usize;
            let s = thermal_distribution(nu, n_max).unwrap().statistics();
            assert!(
                (s.mean - nu).abs() < 1e-9,
                "nu = {nu}: mean error {:.3e}",
                (s.mean - nu).abs()
            );
        }
    }

    #[test]
    fn geometric_moments_match_the_closed_form() {
        // nu = 1 at a generous cutoff: mean 1, variance nu(nu+1) = 2,
        // mandel_q = nu = 1, fano = nu + 1 = 2.
        let s = thermal_distribution(1.0, 96).unwrap().statistics();
        assert!((s.mean - 1.0).abs() < 1e-6);
        assert!((s.variance - 2.0).abs() < 1e-6);
        assert!((s.mandel_q - 1.0).abs() < 1e-6);
        assert!((s.fano - 2.0).abs() < 1e-6);
    }
}
