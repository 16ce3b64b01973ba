//! Reduced units for output.
//!
//! Lengths are measured by `z̃ = 2ω_ref z/c`. Potentials are measured in
//! `U₀ = μ₀ω_ref³|d|²/(12πc)`, forces per unit area in `F₀ = η U₀` and
//! forces per unit area per unit thickness in `F₀·2ω_ref/c`, so that a
//! slab force divided by `F₀ d̃` is the reduced per-thickness force.

use crate::constants::{C, MU_0};
use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedUnits {
    /// Reference frequency ω_ref, rad/s.
    pub omega: f64,
    /// Reference squared dipole moment, C²m².
    pub dipole_sq: f64,
    /// Number density η, m⁻³ (only used for force scales).
    pub eta: f64,
}

impl ReducedUnits {
    pub fn new(omega: f64, dipole_sq: f64, eta: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(omega) && ok(dipole_sq) && ok(eta)) {
            return Err(Error::InvalidParameter(format!(
                "reduced units need positive scales, got omega={omega}, |d|²={dipole_sq}, eta={eta}"
            )));
        }
        Ok(Self {
            omega,
            dipole_sq,
            eta,
        })
    }

    /// Metres per unit of z̃.
    pub fn length(&self) -> f64 {
        C / (2.0 * self.omega)
    }

    /// Energy scale U₀, J.
    pub fn energy(&self) -> f64 {
        MU_0 * self.omega.powi(3) * self.dipole_sq / (12.0 * PI * C)
    }

    /// Force-per-area scale F₀ = ηU₀, N/m².
    pub fn force_per_area(&self) -> f64 {
        self.eta * self.energy()
    }

    /// Per-thickness scale, N/m³.
    pub fn force_per_volume(&self) -> f64 {
        self.force_per_area() / self.length()
    }

    /// Scale of `Tr G⁽¹⁾`, 1/m (`ω/c`).
    pub fn trace_e(&self) -> f64 {
        self.omega / C
    }

    /// Scale of the curl-curl trace, 1/m³ (`(ω/c)³`).
    pub fn trace_m(&self) -> f64 {
        (self.omega / C).powi(3)
    }

    pub fn to_reduced_length(&self, z: f64) -> f64 {
        z / self.length()
    }

    pub fn from_reduced_length(&self, zt: f64) -> f64 {
        zt * self.length()
    }

    pub fn to_reduced_energy(&self, u: f64) -> f64 {
        u / self.energy()
    }

    pub fn from_reduced_energy(&self, ut: f64) -> f64 {
        ut * self.energy()
    }

    pub fn to_reduced_force(&self, f: f64) -> f64 {
        f / self.force_per_area()
    }

    pub fn from_reduced_force(&self, ft: f64) -> f64 {
        ft * self.force_per_area()
    }

    pub fn to_reduced_per_thickness(&self, p: f64) -> f64 {
        p / self.force_per_volume()
    }

    pub fn from_reduced_per_thickness(&self, pt: f64) -> f64 {
        pt * self.force_per_volume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_scales() {
        assert!(ReducedUnits::new(0.0, 1.0, 1.0).is_err());
        assert!(ReducedUnits::new(1.0, f64::NAN, 1.0).is_err());
        assert!(ReducedUnits::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn per_thickness_is_force_over_reduced_thickness() {
        let u = ReducedUnits::new(2e15, 7e-59, 1e20).unwrap();
        let d = 3.0 * u.length();
        let f = 0.37 * u.force_per_area();
        let p = f / d;
        let pt = u.to_reduced_per_thickness(p);
        assert!((pt - u.to_reduced_force(f) / 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trips(
            omega in 1e12f64..1e17,
            d2 in 1e-62f64..1e-55,
            eta in 1e10f64..1e26,
            x in -1e3f64..1e3,
        ) {
            let u = ReducedUnits::new(omega, d2, eta).unwrap();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
            prop_assert!(close(u.to_reduced_length(u.from_reduced_length(x)), x));
            prop_assert!(close(u.to_reduced_energy(u.from_reduced_energy(x)), x));
            prop_assert!(close(u.to_reduced_force(u.from_reduced_force(x)), x));
            prop_assert!(close(u.to_reduced_per_thickness(u.from_reduced_per_thickness(x)), x));
        }
    }
}
