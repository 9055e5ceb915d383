//! Physical constants (exact 2019 SI values). The sole source of these
//! numbers in the crate; everything else derives from them.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817_646_156_4e-34;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
