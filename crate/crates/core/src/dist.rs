//! Photon-number distributions and their summary statistics.
//!
//! A `PhotonDistribution` is a dense vector p(0..=n_max). Entries are
//! nonnegative; rounding dust down to -1e-12 is clamped to zero, anything
//! lower is rejected as corrupt data. Normalization is always an explicit
//! operation, never a silent side effect.

use crate::error::{MaserError, Result};

/// Negative entries above this magnitude are corrupt data, below it they
/// are rounding dust and get clamped to zero.
const NEGATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
}

impl PhotonDistribution {
    /// Wraps raw weights. Entries in [-1e-12, 0) are clamped to 0; entries
    /// below -1e-12 or non-finite are rejected. Does not normalize.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(MaserError::domain("probs", "must have at least one entry"));
        }
        let mut probs = probs;
        for (n, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(MaserError::domain(
                    "probs",
                    format!("entry {n} is not finite"),
                ));
            }
            if *p < 0.0 {
                if *p < -NEGATIVE_TOL {
                    return Err(MaserError::domain(
                        "probs",
                        format!("entry {n} = {p:.3e} is below the -1e-12 clamp"),
                    ));
                }
                *p = 0.0;
            }
        }
        Ok(Self { probs })
    }

    /// Internal constructor for weights already known to be valid.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(probs.iter().all(|p| p.is_finite() && *p >= 0.0));
        Self { probs }
    }

    /// All probability in the vacuum state.
    pub fn vacuum(n_max: usize) -> Self {
        let mut probs = vec![0.0; n_max + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    /// All probability in the number state `n`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(MaserError::domain("n", "fock index must be <= n_max"));
        }
        let mut probs = vec![0.0; n_max + 1];
        probs[n] = 1.0;
        Ok(Self { probs })
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// p(n), zero beyond the cutoff.
    pub fn get(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Sum of all entries.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Explicitly normalized copy. Fails if the total mass is zero.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(MaserError::domain("probs", "cannot normalize zero mass"));
        }
        Ok(Self {
            probs: self.probs.iter().map(|p| p / total).collect(),
        })
    }

    /// Total variation distance 0.5 sum |p(n) - q(n)|, reading entries
    /// beyond either cutoff as zero. Both inputs should be normalized.
    pub fn total_variation_distance(&self, other: &PhotonDistribution) -> f64 {
        let top = self.n_max().max(other.n_max());
        let mut sum = 0.0;
        for n in 0..=top {
            sum += (self.get(n) - other.get(n)).abs();
        }
        0.5 * sum
    }

    /// Mean, variance and the derived Mandel and Fano parameters.
    /// Assumes the distribution is normalized.
    pub fn statistics(&self) -> DistributionStats {
        let mut mean = 0.0;
        let mut second = 0.0;
        for (n, p) in self.probs.iter().enumerate() {
            mean += n as f64 * p;
            second += (n as f64) * (n as f64) * p;
        }
        // Rounding can push the variance of a sharp distribution slightly
        // negative; a true variance is never below zero.
        let variance = (second - mean * mean).max(0.0);
        let (mandel_q, fano) = if mean > 0.0 {
            (variance / mean - 1.0, variance / mean)
        } else {
            (0.0, 1.0)
        };
        DistributionStats {
            mean,
            variance,
            mandel_q,
            fano,
        }
    }
}

/// Summary statistics of a photon-number distribution. `mandel_q` is
/// variance/mean - 1 (0 for an empty cavity), `fano` is variance/mean
/// (1 for an empty cavity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionStats {
    pub mean: f64,
    pub variance: f64,
    pub mandel_q: f64,
    pub fano: f64,
}
