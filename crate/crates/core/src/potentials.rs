//! Casimir-Polder potential of a single atom near the planar reflector.
//!
//! The potential splits into a nonresonant part, an imaginary-frequency
//! integral that every atom has,
//!
//! `U^nr = (ħμ₀/2π) ∫₀^∞ dξ [ξ² α(iξ) Tr G⁽¹⁾(iξ) + β(iξ) Tr ∇×G⁽¹⁾(iξ)×∇′]`,
//!
//! and a resonant part from real downward transitions, present only for
//! excited atoms,
//!
//! `U^r = −(μ₀/3) Σ_{ω_nk>0} [ω_nk² |d_nk|² Tr Re G⁽¹⁾(ω_nk) − |m_nk|² Tr ∇×Re G⁽¹⁾(ω_nk)×∇′]`.
//!
//! Both parts are invariant under the duality transform (α ↔ β/c², ε ↔ μ).

use crate::constants::{C, HBAR, MU_0};
use crate::error::Result;
use crate::greens::{d_dz_traces, green_traces, PlanarGeometry};
use crate::materials::{magnetizability, polarizability, resonant_weights, AtomModel, Frequency};
use crate::quadrature::{integrate_semi_infinite, QuadratureConfig};

/// A value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
        }
    }
}

/// Nonresonant, resonant and total potential, J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialResult {
    pub u_nonresonant: f64,
    pub u_resonant: f64,
    pub u_total: f64,
    pub quadrature_error: f64,
}

impl PotentialResult {
    fn from_parts(nr: Estimate, r: Estimate) -> Self {
        Self {
            u_nonresonant: nr.value,
            u_resonant: r.value,
            u_total: nr.value + r.value,
            quadrature_error: nr.abs_error + r.abs_error,
        }
    }
}

/// Decay scale for the ξ map: the larger of the atomic frequency and `c/2z_A`.
fn xi_scale(atom: &AtomModel, geometry: &PlanarGeometry) -> f64 {
    atom.max_frequency().max(C / (2.0 * geometry.z_a))
}

/// Shared ξ-integral for the potential (`derivative = false`) or its
/// z-gradient (`derivative = true`).
fn nonresonant_integral(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
    derivative: bool,
) -> Result<Estimate> {
    if geometry.reflector.is_vacuum() {
        return Ok(Estimate::exact(0.0));
    }
    let has_magnetic = atom.transitions.iter().any(|t| t.magnetic_sq > 0.0);
    let has_electric = atom.transitions.iter().any(|t| t.dipole_sq > 0.0);
    let inner = config.inner();
    let mut failure = None;
    // Worst relative error of the inner evaluations, applied to the result.
    let mut inner_rel = 0.0f64;

    let integrand = |xi: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        let f = Frequency::Imaginary(xi);
        let eval = || -> Result<(f64, f64)> {
            let (te, tm, ee, em) = if derivative {
                let d = d_dz_traces(geometry, f, &inner)?;
                (d.d_trace_e.re, d.d_trace_m.re, d.error_e, d.error_m)
            } else {
                let t = green_traces(geometry, f, &inner)?;
                (t.trace_e.re, t.trace_m.re, t.error_e, t.error_m)
            };
            let mut value = 0.0;
            let mut err = 0.0;
            if has_electric {
                let a = xi * xi * polarizability(atom, f, 0.0)?.re;
                value += a * te;
                err += a.abs() * ee;
            }
            if has_magnetic {
                let b = magnetizability(atom, f, 0.0)?.re;
                value += b * tm;
                err += b.abs() * em;
            }
            Ok((value, err))
        };
        match eval() {
            Ok((v, e)) => {
                if e > 0.0 {
                    inner_rel = inner_rel.max(e / v.abs().max(f64::MIN_POSITIVE));
                }
                v
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let r = integrate_semi_infinite(integrand, xi_scale(atom, geometry), config);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    let pre = HBAR * MU_0 / (2.0 * std::f64::consts::PI);
    Ok(Estimate {
        value: pre * r.value,
        abs_error: pre.abs() * (r.abs_error_estimate + inner_rel.min(1.0) * r.value.abs()),
    })
}

/// Nonresonant potential `U^nr(z_A)`, J.
pub fn nonresonant_potential(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
) -> Result<Estimate> {
    nonresonant_integral(atom, geometry, config, false)
}

/// `∂U^nr/∂z_A`, J/m.
pub fn nonresonant_gradient(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
) -> Result<Estimate> {
    nonresonant_integral(atom, geometry, config, true)
}

fn resonant_sum(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
    derivative: bool,
) -> Result<Estimate> {
    let weights = resonant_weights(atom);
    if weights.is_empty() || geometry.reflector.is_vacuum() {
        return Ok(Estimate::exact(0.0));
    }
    let inner = config.inner();
    let mut value = 0.0;
    let mut err = 0.0;
    for w in weights {
        let f = Frequency::Real(w.omega);
        let (te, tm, ee, em) = if derivative {
            let d = d_dz_traces(geometry, f, &inner)?;
            (d.d_trace_e.re, d.d_trace_m.re, d.error_e, d.error_m)
        } else {
            let t = green_traces(geometry, f, &inner)?;
            (t.trace_e.re, t.trace_m.re, t.error_e, t.error_m)
        };
        let we = w.electric * w.omega * w.omega;
        value += we * te - w.magnetic * tm;
        err += we * ee + w.magnetic * em;
    }
    // (μ₀/3)|d|² = (μ₀ħ/π)·(π|d|²/3ħ)
    let pre = -MU_0 * HBAR / std::f64::consts::PI;
    Ok(Estimate {
        value: pre * value,
        abs_error: pre.abs() * err,
    })
}

/// Resonant potential `U^r(z_A)`, J. Exactly zero for ground states.
pub fn resonant_potential(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
) -> Result<Estimate> {
    resonant_sum(atom, geometry, config, false)
}

/// `∂U^r/∂z_A`, J/m, from the analytic trace derivatives.
pub fn resonant_gradient(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
) -> Result<Estimate> {
    resonant_sum(atom, geometry, config, true)
}

pub fn total_potential(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
) -> Result<PotentialResult> {
    let nr = nonresonant_potential(atom, geometry, config)?;
    let r = resonant_potential(atom, geometry, config)?;
    Ok(PotentialResult::from_parts(nr, r))
}

/// Gradient of both parts, packed like a [`PotentialResult`] (J/m).
pub fn total_gradient(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
    config: &QuadratureConfig,
) -> Result<PotentialResult> {
    let nr = nonresonant_gradient(atom, geometry, config)?;
    let r = resonant_gradient(atom, geometry, config)?;
    Ok(PotentialResult::from_parts(nr, r))
}

/// Simultaneous exchange `|d|² ↔ |m|²/c²` and ε ↔ μ.
pub fn duality_transform(
    atom: &AtomModel,
    geometry: &PlanarGeometry,
) -> (AtomModel, PlanarGeometry) {
    (atom.dual(), geometry.dual())
}
