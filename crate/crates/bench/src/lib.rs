//! Shared fixtures for the criterion benchmarks.

use micromaser::{MaserConfig, NumberStateMatrix};
use num_complex::Complex64;

/// Resonant operating point with the usual 21.5/s damping.
pub fn operating_point(ratio: f64, nu: f64, phi: f64, n_max: usize) -> MaserConfig {
    MaserConfig::new(0.0, ratio * 21.5, 21.5, nu, phi, n_max).expect("valid bench config")
}

/// Pure state with geometrically decaying amplitudes; the cutoff entry
/// is far below every leak guard.
pub fn damped_pure_state(dim: usize) -> NumberStateMatrix {
    let amps: Vec<Complex64> = (0..dim)
        .map(|n| Complex64::new(0.7f64.powi(n as i32), 0.0))
        .collect();
    NumberStateMatrix::pure_state(&amps).expect("valid bench state")
}
