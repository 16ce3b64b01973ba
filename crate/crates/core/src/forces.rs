//! Casimir force on an optically dilute slab.
//!
//! A slab of thickness `d` and number density η occupies `z ∈ [z, z + d]`
//! above the reflector. To linear order in η the force per unit area is the
//! density-weighted sum of single-atom Casimir-Polder forces,
//!
//! `f = −η ∫_z^{z+d} dz_A ∂U/∂z_A = −η [U(z + d) − U(z)]`.
//!
//! Negative values point toward the reflector.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::constants::{C, MU_0};
use crate::error::{Error, Result};
use crate::greens::PlanarGeometry;
use crate::materials::{clausius_mossotti, AtomModel, Frequency, MaterialResponse};
use crate::potentials::{
    nonresonant_gradient, resonant_gradient, total_potential, PotentialResult,
};
use crate::quadrature::{integrate_finite, QuadratureConfig};

/// Prefactor `C` in the two-level/perfect-mirror closed form
/// `f = (μ₀/3)ηω²|d|²·C·(ω/c)[b(z̃)]_{z}^{z+d}`.
pub const PLATE_FORCE_CONSTANT: f64 = 1.0 / (2.0 * PI);

/// Which sign the force carries relative to the potential gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// `F = −∇U`: negative force is attraction toward the reflector.
    #[default]
    MinusGradient,
    /// `F = +∇U`: every force component flips together.
    PlusGradient,
}

impl SignConvention {
    pub fn factor(self) -> f64 {
        match self {
            SignConvention::MinusGradient => -1.0,
            SignConvention::PlusGradient => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SignConvention::MinusGradient => "F = -grad U",
            SignConvention::PlusGradient => "F = +grad U",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlabScenario {
    /// Gap between reflector and slab, m.
    pub z: f64,
    /// Slab thickness, m.
    pub d: f64,
    /// Number density, m⁻³.
    pub eta: f64,
    pub atom: AtomModel,
    pub reflector: MaterialResponse,
    pub convention: SignConvention,
}

impl SlabScenario {
    /// Validates the geometry and checks diluteness at zero frequency.
    /// Violating the dilute guard only warns.
    pub fn new(
        z: f64,
        d: f64,
        eta: f64,
        atom: AtomModel,
        reflector: MaterialResponse,
    ) -> Result<Self> {
        let s = Self {
            z,
            d,
            eta,
            atom,
            reflector,
            convention: SignConvention::default(),
        };
        s.validate()?;
        if s.dilute_guard_exceeded()? {
            warn!("slab with eta = {eta:e} m^-3 is not optically dilute; linear-in-eta force is unreliable");
        }
        Ok(s)
    }

    pub fn with_convention(mut self, convention: SignConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn at_gap(&self, z: f64) -> Result<Self> {
        let s = Self { z, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.z) {
            return Err(Error::InvalidParameter(format!(
                "gap must be positive and finite, got {}",
                self.z
            )));
        }
        if !ok(self.d) {
            return Err(Error::InvalidParameter(format!(
                "slab thickness must be positive and finite, got {}",
                self.d
            )));
        }
        if !ok(self.eta) {
            return Err(Error::InvalidParameter(format!(
                "number density must be positive and finite, got {}",
                self.eta
            )));
        }
        self.atom.validate()?;
        self.reflector.validate()
    }

    /// `|ε − 1|` or `|1 − 1/μ|` of the slab at zero frequency above the guard.
    pub fn dilute_guard_exceeded(&self) -> Result<bool> {
        Ok(
            clausius_mossotti(self.eta, &self.atom, Frequency::Imaginary(0.0), 0.0)?
                .dilute_guard_exceeded,
        )
    }

    fn geometry(&self, z_a: f64) -> Result<PlanarGeometry> {
        PlanarGeometry::new(self.reflector.clone(), z_a)
    }
}

/// Force per unit area (N/m²) split by origin, plus force per unit area
/// per unit thickness (N/m³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    pub z: f64,
    pub f_resonant: f64,
    pub f_nonresonant: f64,
    pub f_total: f64,
    pub per_thickness: f64,
    pub quadrature_error: f64,
    pub convention: SignConvention,
}

/// Closed-form two-level plate force together with the constant used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormForce {
    pub force: f64,
    pub constant: f64,
}

/// `b(x) = [(2 − x²) cos x + 2x sin x]/x³`, so that the perfect-mirror
/// trace is `Tr Re G⁽¹⁾ = (ω/2πc)·b(z̃)`.
pub fn mirror_trace_shape(x: f64) -> f64 {
    ((2.0 - x * x) * x.cos() + 2.0 * x * x.sin()) / (x * x * x)
}

/// Resonant force on an excited two-level electric slab above a perfect
/// electric mirror, in closed form.
pub fn plate_force_closed_form(scenario: &SlabScenario) -> Result<ClosedFormForce> {
    scenario.validate()?;
    if !matches!(scenario.reflector, MaterialResponse::PerfectElectricMirror) {
        return Err(Error::Unsupported(
            "closed-form plate force needs a perfect electric mirror".into(),
        ));
    }
    let atom = &scenario.atom;
    if !atom.is_two_level_electric() || !atom.is_excited() {
        return Err(Error::Unsupported(
            "closed-form plate force needs an excited two-level electric atom".into(),
        ));
    }
    let t = &atom.transitions[0];
    let w = t.omega_nk;
    let zt = |z: f64| 2.0 * w * z / C;
    let bracket =
        mirror_trace_shape(zt(scenario.z + scenario.d)) - mirror_trace_shape(zt(scenario.z));
    let force = -scenario.convention.factor()
        * (MU_0 / 3.0)
        * scenario.eta
        * w
        * w
        * t.dipole_sq
        * PLATE_FORCE_CONSTANT
        * (w / C)
        * bracket;
    Ok(ClosedFormForce {
        force,
        constant: PLATE_FORCE_CONSTANT,
    })
}

/// Force from integrating `η ∂U/∂z_A` across the slab, each part
/// separately. Works for any atom and reflector.
pub fn plate_force_quadrature(
    scenario: &SlabScenario,
    config: &QuadratureConfig,
) -> Result<ForceResult> {
    scenario.validate()?;
    let inner = config.inner();
    let mut failure = None;
    // Largest inner error estimate seen, per part; bounded by width × max.
    let mut inner_err = [0.0f64; 2];
    let integrand = |z_a: f64| -> [f64; 2] {
        if failure.is_some() {
            return [0.0; 2];
        }
        let eval = || -> Result<[f64; 4]> {
            let g = scenario.geometry(z_a)?;
            let r = resonant_gradient(&scenario.atom, &g, &inner)?;
            let nr = nonresonant_gradient(&scenario.atom, &g, &inner)?;
            Ok([r.value, nr.value, r.abs_error, nr.abs_error])
        };
        match eval() {
            Ok([r, nr, er, enr]) => {
                inner_err = [inner_err[0].max(er), inner_err[1].max(enr)];
                [r, nr]
            }
            Err(e) => {
                failure = Some(e);
                [0.0; 2]
            }
        }
    };
    // Gradients in SI are tiny; only the relative tolerance is meaningful.
    let outer = QuadratureConfig {
        abs_tol: 0.0,
        ..*config
    };
    let res = integrate_finite(integrand, scenario.z, scenario.z + scenario.d, &outer);
    if let Some(e) = failure {
        return Err(e);
    }
    let res = res?;
    let s = scenario.convention.factor() * scenario.eta;
    let f_resonant = s * res.value[0];
    let f_nonresonant = s * res.value[1];
    let f_total = f_resonant + f_nonresonant;
    let err = scenario.eta
        * (res.abs_error_estimate[0]
            + res.abs_error_estimate[1]
            + scenario.d * (inner_err[0] + inner_err[1]));
    Ok(ForceResult {
        z: scenario.z,
        f_resonant,
        f_nonresonant,
        f_total,
        per_thickness: f_total / scenario.d,
        quadrature_error: err,
        convention: scenario.convention,
    })
}

/// Force on the slab for every gap in `z_grid`, from potential differences
/// across the slab. Each distinct `z_A` is evaluated once; the output is in
/// input order regardless of scheduling.
pub fn force_decomposition(
    scenario: &SlabScenario,
    z_grid: &[f64],
    config: &QuadratureConfig,
) -> Result<Vec<ForceResult>> {
    scenario.validate()?;
    let mut points: Vec<f64> = z_grid.iter().flat_map(|&z| [z, z + scenario.d]).collect();
    for &z in &points {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gap must be positive and finite, got {z}"
            )));
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let potentials: Vec<PotentialResult> = points
        .par_iter()
        .map(|&z| total_potential(&scenario.atom, &scenario.geometry(z)?, config))
        .collect::<Result<_>>()?;
    let table: HashMap<u64, PotentialResult> =
        points.iter().map(|z| z.to_bits()).zip(potentials).collect();
    let s = scenario.convention.factor() * scenario.eta;
    Ok(z_grid
        .iter()
        .map(|&z| {
            let near = table[&z.to_bits()];
            let far = table[&(z + scenario.d).to_bits()];
            let f_resonant = s * (far.u_resonant - near.u_resonant);
            let f_nonresonant = s * (far.u_nonresonant - near.u_nonresonant);
            let f_total = f_resonant + f_nonresonant;
            ForceResult {
                z,
                f_resonant,
                f_nonresonant,
                f_total,
                per_thickness: f_total / scenario.d,
                quadrature_error: scenario.eta * (near.quadrature_error + far.quadrature_error),
                convention: scenario.convention,
            }
        })
        .collect())
}

/// Fits the closed-form constant from quadrature: the ratio of the
/// quadrature resonant force to the closed form with unit constant,
/// averaged over the given scenarios.
pub fn calibrate_plate_force_constant(
    scenarios: &[SlabScenario],
    config: &QuadratureConfig,
) -> Result<f64> {
    if scenarios.is_empty() {
        return Err(Error::InvalidParameter("no calibration scenarios".into()));
    }
    let mut sum = 0.0;
    for s in scenarios {
        let unit = plate_force_closed_form(s)?.force / PLATE_FORCE_CONSTANT;
        if unit == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "calibration scenario at z = {} sits on a force zero",
                s.z
            )));
        }
        sum += plate_force_quadrature(s, config)?.f_resonant / unit;
    }
    Ok(sum / scenarios.len() as f64)
}
