//! CODATA 2018 physical constants, SI.

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Atomic unit of electric dipole moment e·a₀, C·m.
pub const ATOMIC_DIPOLE: f64 = 8.478_353_625_5e-30;
