//! Potentials and slab forces against independent limits and properties.

use std::f64::consts::PI;

use proptest::prelude::*;

use casimir_core::constants::{ATOMIC_DIPOLE, C, EPSILON_0, HBAR, MU_0};
use casimir_core::forces::{
    force_decomposition, plate_force_closed_form, plate_force_quadrature, SlabScenario,
};
use casimir_core::materials::{DrudeLorentz, Oscillator};
use casimir_core::potentials::{nonresonant_potential, resonant_potential, total_potential};
use casimir_core::quadrature::QuadratureConfig;
use casimir_core::{AtomModel, MaterialResponse, PlanarGeometry};

const W10: f64 = 2.0e15;
const D2: f64 = ATOMIC_DIPOLE * ATOMIC_DIPOLE;
const ETA: f64 = 1.0e20;

fn len(zt: f64) -> f64 {
    zt * C / (2.0 * W10)
}

fn pec(zt: f64) -> PlanarGeometry {
    PlanarGeometry::new(MaterialResponse::PerfectElectricMirror, len(zt)).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::with_rel_tol(1e-11)
}

/// Nonretarded limit for a ground-state atom: `−|d|²/(48πε₀z³)`.
#[test]
fn ground_state_matches_nonretarded_limit() {
    let g = AtomModel::two_level_ground(W10, D2).unwrap();
    let zt = 1e-4;
    let u = nonresonant_potential(&g, &pec(zt), &cfg()).unwrap().value;
    let z = len(zt);
    let lj = -D2 / (48.0 * PI * EPSILON_0 * z * z * z);
    assert!((u / lj - 1.0).abs() < 1e-3, "{}", u / lj);
}

/// Retarded limit for a ground-state atom: `−3ħcα(0)/(32π²ε₀z⁴)`.
#[test]
fn ground_state_matches_retarded_limit() {
    let g = AtomModel::two_level_ground(W10, D2).unwrap();
    let zt = 1e4;
    let u = nonresonant_potential(&g, &pec(zt), &cfg()).unwrap().value;
    let z = len(zt);
    let alpha0 = 2.0 * D2 / (3.0 * HBAR * W10);
    let cp = -3.0 * HBAR * C * alpha0 / (32.0 * PI * PI * EPSILON_0 * z.powi(4));
    assert!((u / cp - 1.0).abs() < 1e-3, "{}", u / cp);
}

/// Trapezoid-rule evaluation of the imaginary-frequency integral for a
/// two-level ground state in front of a perfect mirror, written out from
/// the image-dipole field with no shared code.
fn trapezoid_oracle(zt: f64) -> f64 {
    let z = len(zt);
    let n = 400_000;
    let t_max = 1.0 - 1e-9;
    let h = t_max / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let t = i as f64 * h;
        let xi = W10 * t / (1.0 - t);
        let jac = W10 / ((1.0 - t) * (1.0 - t));
        let alpha = 2.0 * W10 * D2 / (3.0 * HBAR * (W10 * W10 + xi * xi));
        let value = if xi == 0.0 {
            // ξ²·Tr G → −c²/(8πz³) as ξ → 0.
            alpha * (-C * C / (8.0 * PI * z * z * z))
        } else {
            let s = 2.0 * xi * z / C;
            let gxx = -xi * (-s).exp() * (1.0 + s + s * s) / (4.0 * PI * C * s * s * s);
            let gzz = -xi * (-s).exp() * (1.0 + s) / (2.0 * PI * C * s * s * s);
            xi * xi * alpha * (2.0 * gxx + gzz)
        };
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        sum += w * value * jac;
    }
    HBAR * MU_0 / (2.0 * PI) * sum * h
}

#[test]
fn ground_state_potential_matches_trapezoid_oracle() {
    let g = AtomModel::two_level_ground(W10, D2).unwrap();
    for zt in [0.1, 1.0, 10.0] {
        let u = nonresonant_potential(&g, &pec(zt), &cfg()).unwrap().value;
        let oracle = trapezoid_oracle(zt);
        assert!(u < 0.0);
        assert!((u / oracle - 1.0).abs() < 1e-6, "z~={zt}: {}", u / oracle);
    }
}

#[test]
fn ground_state_decays_monotonically_when_retarded() {
    let g = AtomModel::two_level_ground(W10, D2).unwrap();
    let mut last = f64::NEG_INFINITY;
    for i in 0..30 {
        let zt = 5.0 * 1.2f64.powi(i);
        let u = nonresonant_potential(&g, &pec(zt), &cfg()).unwrap().value;
        assert!(u < 0.0 && u > last, "z~={zt}");
        last = u;
    }
}

#[test]
fn excited_resonant_potential_oscillates_in_far_field() {
    // U^r ∝ −Tr Re G, dominated by −cos z̃/z̃ at large z̃.
    let e = AtomModel::two_level_excited(W10, D2).unwrap();
    let sign = |zt: f64| resonant_potential(&e, &pec(zt), &cfg()).unwrap().value > 0.0;
    let k = 20.0;
    assert!(sign(2.0 * PI * k));
    assert!(!sign(2.0 * PI * k + PI));
}

#[test]
fn drude_half_space_potential_is_bounded_by_mirror() {
    let g = AtomModel::two_level_ground(W10, D2).unwrap();
    let metal = MaterialResponse::DrudeLorentz(DrudeLorentz {
        eps_background: 1.0,
        mu_background: 1.0,
        eps_oscillators: vec![Oscillator::absorbing(1.4e16, 0.0, 1e14)],
        mu_oscillators: vec![],
    });
    let cfg = QuadratureConfig::default();
    for zt in [0.3, 3.0, 30.0] {
        let m = nonresonant_potential(&g, &pec(zt), &cfg).unwrap().value;
        let h = nonresonant_potential(
            &g,
            &PlanarGeometry::new(metal.clone(), len(zt)).unwrap(),
            &cfg,
        )
        .unwrap()
        .value;
        assert!(h < 0.0 && h > m, "z~={zt}: {h} vs {m}");
    }
}

fn slab(zt: f64, dt: f64) -> SlabScenario {
    SlabScenario::new(
        len(zt),
        len(dt),
        ETA,
        AtomModel::two_level_excited(W10, D2).unwrap(),
        MaterialResponse::PerfectElectricMirror,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn slab_forces_are_additive(zt in 0.1f64..40.0, d1 in 0.05f64..10.0, d2 in 0.05f64..10.0) {
        let whole = plate_force_closed_form(&slab(zt, d1 + d2)).unwrap().force;
        let parts = plate_force_closed_form(&slab(zt, d1)).unwrap().force
            + plate_force_closed_form(&slab(zt + d1, d2)).unwrap().force;
        let scale = plate_force_closed_form(&slab(zt, d1)).unwrap().force.abs()
            .max(plate_force_closed_form(&slab(zt + d1, d2)).unwrap().force.abs());
        prop_assert!((whole - parts).abs() <= 1e-12 * scale);
    }

    #[test]
    fn force_is_linear_in_density(zt in 0.1f64..40.0, dt in 0.05f64..10.0, k in 0.01f64..100.0) {
        let a = slab(zt, dt);
        let mut b = a.clone();
        b.eta *= k;
        let cfg = QuadratureConfig::default();
        let fa = force_decomposition(&a, &[a.z], &cfg).unwrap()[0];
        let fb = force_decomposition(&b, &[b.z], &cfg).unwrap()[0];
        prop_assert!((fb.f_total - k * fa.f_total).abs() <= 1e-12 * (k * fa.f_total).abs());
    }
}

#[test]
fn boundary_difference_matches_gradient_quadrature() {
    let s = SlabScenario::new(
        len(0.7),
        len(1.5),
        ETA,
        AtomModel::two_level_excited(W10, D2).unwrap(),
        MaterialResponse::DrudeLorentz(DrudeLorentz {
            eps_background: 2.0,
            mu_background: 1.0,
            eps_oscillators: vec![Oscillator::absorbing(3e15, 1.5e15, 1e14)],
            mu_oscillators: vec![],
        }),
    )
    .unwrap();
    let cfg = QuadratureConfig::with_rel_tol(1e-8);
    let diff = force_decomposition(&s, &[s.z], &cfg).unwrap()[0];
    let quad = plate_force_quadrature(&s, &cfg).unwrap();
    let tol = 10.0 * (diff.quadrature_error + quad.quadrature_error);
    assert!((diff.f_resonant - quad.f_resonant).abs() <= tol);
    assert!((diff.f_nonresonant - quad.f_nonresonant).abs() <= tol);
}

#[test]
fn per_thickness_envelope_falls_over_one_period() {
    // Largest |f/d| over one period in z, as d grows from small to one period.
    let period = 2.0 * PI;
    let envelope = |dt: f64| {
        (0..200)
            .map(|i| 20.0 + period * i as f64 / 200.0)
            .map(|zt| {
                let s = slab(zt, dt);
                (plate_force_closed_form(&s).unwrap().force / s.d).abs()
            })
            .fold(0.0, f64::max)
    };
    let mut last = f64::INFINITY;
    for k in 1..=16 {
        let a = envelope(period * k as f64 / 16.0);
        assert!(a <= last, "k = {k}");
        last = a;
    }
}

#[test]
fn sweep_results_do_not_depend_on_scheduling() {
    let s = slab(0.5, 2.0);
    let grid: Vec<f64> = (0..64).map(|i| len(0.5 + 0.37 * i as f64)).collect();
    let cfg = QuadratureConfig::default();
    let all = force_decomposition(&s, &grid, &cfg).unwrap();
    for (i, &z) in grid.iter().enumerate().step_by(7) {
        let one = force_decomposition(&s, &[z], &cfg).unwrap()[0];
        assert_eq!(one, all[i]);
    }
    let u = total_potential(&s.atom, &pec(0.5), &cfg).unwrap();
    assert_eq!(u, total_potential(&s.atom, &pec(0.5), &cfg).unwrap());
}
