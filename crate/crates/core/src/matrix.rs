//! Density matrices in the photon-number basis.
//!
//! Storage is a dense row-major square of complex entries, index
//! `[n * dim + m]` for <n|rho|m>. Construction enforces Hermiticity
//! exactly (entries are symmetrized once, at the boundary) and checks the
//! trace; positivity is a property of physical evolution and is asserted
//! in tests rather than on every construction.

use num_complex::Complex64;

use crate::dist::PhotonDistribution;
use crate::error::{MaserError, Result};

/// Largest Hermiticity defect accepted from external data.
const HERMITICITY_TOL: f64 = 1e-12;
/// Largest trace defect accepted from external data.
const TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NumberStateMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl NumberStateMatrix {
    /// Builds from row-major entries of a unit-trace matrix that is
    /// Hermitian up to 1e-12. The stored copy is symmetrized, so
    /// `entry(n, m) == entry(m, n).conj()` holds exactly afterwards.
    pub fn from_entries(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(MaserError::domain(
                "data",
                format!("expected {dim} x {dim} row-major entries"),
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MaserError::domain("data", "entries must be finite"));
        }
        let mut data = data;
        for n in 0..dim {
            for m in (n + 1)..dim {
                let a = data[n * dim + m];
                let b = data[m * dim + n];
                if (a - b.conj()).norm() > HERMITICITY_TOL {
                    return Err(MaserError::domain(
                        "data",
                        format!("entries ({n},{m})/({m},{n}) break Hermiticity"),
                    ));
                }
                let sym = 0.5 * (a + b.conj());
                data[n * dim + m] = sym;
                data[m * dim + n] = sym.conj();
            }
            let d = data[n * dim + n];
            if d.im.abs() > HERMITICITY_TOL {
                return Err(MaserError::domain(
                    "data",
                    format!("diagonal entry {n} has imaginary part {:.3e}", d.im),
                ));
            }
            data[n * dim + n] = Complex64::new(d.re, 0.0);
        }
        let trace: f64 = (0..dim).map(|n| data[n * dim + n].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(MaserError::domain(
                "data",
                format!("trace {trace:.12} is not 1 within 1e-9"),
            ));
        }
        Ok(Self { dim, data })
    }

    /// Internal constructor for entries produced by trusted maps that
    /// preserve Hermiticity exactly.
    pub(crate) fn from_raw(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    /// Diagonal matrix carrying a photon-number distribution.
    pub fn from_diagonal(dist: &PhotonDistribution) -> Self {
        let dim = dist.n_max() + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for n in 0..dim {
            data[n * dim + n] = Complex64::new(dist.get(n), 0.0);
        }
        Self { dim, data }
    }

    /// Pure number state |n><n|.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        Ok(Self::from_diagonal(&PhotonDistribution::fock(n, n_max)?))
    }

    /// Pure state |psi><psi| from number-basis amplitudes, normalized here.
    pub fn pure_state(amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(MaserError::domain("amplitudes", "must not be empty"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(MaserError::domain(
                "amplitudes",
                "must have finite, nonzero norm",
            ));
        }
        let dim = amplitudes.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for n in 0..dim {
            for m in 0..dim {
                data[n * dim + m] = amplitudes[n] * amplitudes[m].conj() / norm_sq;
            }
        }
        Ok(Self { dim, data })
    }

    /// Matrix dimension, n_max + 1.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.dim - 1
    }

    /// <n|rho|m>; zero outside the stored block.
    pub fn entry(&self, n: usize, m: usize) -> Complex64 {
        if n < self.dim && m < self.dim {
            self.data[n * self.dim + m]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Trace; real because the diagonal is real by construction.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|n| self.data[n * self.dim + n].re).sum()
    }

    /// Diagonal as raw weights.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|n| self.data[n * self.dim + n].re)
            .collect()
    }

    /// Diagonal as a photon-number distribution; rejects diagonals with
    /// entries below the -1e-12 clamp.
    pub fn diagonal_distribution(&self) -> Result<PhotonDistribution> {
        PhotonDistribution::new(self.diagonal())
    }

    /// Largest Hermiticity defect of raw entries; zero for constructed
    /// matrices, useful on the output of numerical maps.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..self.dim {
            for m in n..self.dim {
                let defect =
                    (self.data[n * self.dim + m] - self.data[m * self.dim + n].conj()).norm();
                worst = worst.max(defect);
            }
        }
        worst
    }

    /// Sum of n p(n) over the diagonal.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim)
            .map(|n| n as f64 * self.data[n * self.dim + n].re)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes_exactly() {
        // Off-diagonal pair differing by 5e-13 passes and is symmetrized.
        let dim = 2;
        let eps = 5e-13;
        let data = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.1, -0.2 + eps),
            Complex64::new(0.5, 0.0),
        ];
        let rho = NumberStateMatrix::from_entries(dim, data).unwrap();
        assert_eq!(rho.entry(0, 1), rho.entry(1, 0).conj());
        assert_eq!(rho.hermiticity_defect(), 0.0);
    }

    #[test]
    fn construction_rejects_broken_inputs() {
        let bad_herm = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.3, -0.2),
            Complex64::new(0.5, 0.0),
        ];
        assert!(NumberStateMatrix::from_entries(2, bad_herm).is_err());

        let bad_trace = vec![
            Complex64::new(0.9, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.2, 0.0),
        ];
        assert!(NumberStateMatrix::from_entries(2, bad_trace).is_err());
        assert!(NumberStateMatrix::from_entries(2, vec![]).is_err());
    }

    #[test]
    fn pure_state_normalizes_and_reports_mean_field_ingredients() {
        // (|0> + |1>)/sqrt(2), built from unnormalized amplitudes.
        let rho =
            NumberStateMatrix::pure_state(&[Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)])
                .unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.entry(1, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.mean_photon_number() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diagonal_round_trips_through_a_distribution() {
        let d = PhotonDistribution::new(vec![0.25, 0.5, 0.25]).unwrap();
        let rho = NumberStateMatrix::from_diagonal(&d);
        assert_eq!(rho.diagonal_distribution().unwrap().probs(), d.probs());
        assert_eq!(rho.trace(), 1.0);
    }
}
