//! One-atom maser simulation: a lossy cavity mode pumped by a dilute
//! beam of excited two-level atoms.
//!
//! Three complementary views of the same physics: closed-form stationary
//! distributions (`steady`), deterministic integration of the field's
//! equation of motion (`master`), and seeded stochastic trajectories of
//! individual atom passages (`trajectory`). `jcm` holds the single-atom
//! passage and gain maps everything else builds on.

pub mod config;
pub mod constants;
pub mod dist;
pub mod error;
pub mod jcm;
pub mod master;
pub mod matrix;
pub mod steady;
pub mod thermal;
pub mod trajectory;

pub use config::{decay_rate_from_q, MaserConfig, DEFAULT_N_MAX};
pub use dist::{DistributionStats, PhotonDistribution};
pub use error::{MaserError, Result};
pub use matrix::NumberStateMatrix;
pub use thermal::{thermal_distribution, thermal_photon_number};
