//! Scattering Green tensor of a single planar interface at coincident points.
//!
//! The reflector fills `z < 0`; the atom sits in vacuum at height `z_A`.
//! Only the scattering part `G⁽¹⁾` is ever formed, since the bulk part
//! diverges at coincidence and does not depend on the atom's position.
//!
//! Two traces are provided: the electric trace `Tr G⁽¹⁾(r, r, ω)` (m⁻¹)
//! and the curl-curl trace `Tr[∇×G⁽¹⁾(r, r, ω)×∇′]` (m⁻³) that couples to
//! magnetic dipoles. The curl-curl trace is obtained through duality:
//! it equals `−(ω/c)²` times the electric trace of the ε ↔ μ image of the
//! reflector, which for a Fresnel surface is the exchange `r_s ↔ r_p`.
//!
//! Reflection coefficients follow the convention in which a perfect
//! electric mirror has `r_s = −1`, `r_p = +1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::C;
use crate::error::{Error, Result};
use crate::materials::{DrudeLorentz, Frequency, MaterialResponse};
use crate::quadrature::{
    integrate_finite, integrate_semi_infinite, QuadratureConfig, QuadratureResult,
};

/// Reflector at `z = 0` and observation height `z_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGeometry {
    pub reflector: MaterialResponse,
    /// Atom-surface distance, m.
    pub z_a: f64,
}

impl PlanarGeometry {
    pub fn new(reflector: MaterialResponse, z_a: f64) -> Result<Self> {
        if !(z_a > 0.0 && z_a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "observation distance must be positive, got {z_a}"
            )));
        }
        reflector.validate()?;
        Ok(Self { reflector, z_a })
    }

    pub fn at(&self, z_a: f64) -> Result<Self> {
        Self::new(self.reflector.clone(), z_a)
    }

    /// ε ↔ μ image of the reflector at the same distance.
    pub fn dual(&self) -> Self {
        Self {
            reflector: self.reflector.dual(),
            z_a: self.z_a,
        }
    }
}

/// Coincident-point traces of the scattering Green tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTrace {
    pub freq: Frequency,
    /// `Tr G⁽¹⁾`, m⁻¹.
    pub trace_e: Complex64,
    /// `Tr[∇×G⁽¹⁾×∇′]`, m⁻³.
    pub trace_m: Complex64,
    /// Absolute quadrature error estimates (zero for closed forms).
    pub error_e: f64,
    pub error_m: f64,
}

/// z-derivatives of the two traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceDerivative {
    /// `∂/∂z_A Tr G⁽¹⁾`, m⁻².
    pub d_trace_e: Complex64,
    /// `∂/∂z_A Tr[∇×G⁽¹⁾×∇′]`, m⁻⁴.
    pub d_trace_m: Complex64,
    pub error_e: f64,
    pub error_m: f64,
}

/// Diagonal of `G⁽¹⁾(r, r, ω)` for a perfect mirror; off-diagonals vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorComponents {
    pub xx: Complex64,
    pub yy: Complex64,
    pub zz: Complex64,
}

impl MirrorComponents {
    pub fn trace(&self) -> Complex64 {
        self.xx + self.yy + self.zz
    }
}

/// +1 for a perfect electric mirror, −1 for a perfect magnetic one.
fn mirror_sign(reflector: &MaterialResponse) -> Option<f64> {
    match reflector {
        MaterialResponse::PerfectElectricMirror => Some(1.0),
        MaterialResponse::PerfectMagneticMirror => Some(-1.0),
        MaterialResponse::DrudeLorentz(_) => None,
    }
}

fn check_field_frequency(freq: Frequency) -> Result<()> {
    freq.validate()?;
    match freq {
        Frequency::Imaginary(xi) if xi <= 0.0 => Err(Error::InvalidParameter(
            "scattering Green tensor needs ξ > 0 on the imaginary axis".into(),
        )),
        Frequency::Real(w) if w <= 0.0 => Err(Error::InvalidParameter(format!(
            "real frequency must be positive, got {w}"
        ))),
        _ => Ok(()),
    }
}

/// `(ω/c)²` as a complex number.
fn k_squared(freq: Frequency) -> Complex64 {
    let k = freq.as_complex() / C;
    k * k
}

/// Real closed forms on the imaginary axis for a perfect electric mirror,
/// as functions of `s = 2ξz/c`: `(G_xx, G_zz)` and their `s`-derivatives.
fn pec_imaginary(xi: f64, s: f64) -> ([f64; 2], [f64; 2]) {
    let e = (-s).exp();
    let s3 = s * s * s;
    let s4 = s3 * s;
    let pre_xx = -xi / (4.0 * PI * C);
    let pre_zz = -xi / (2.0 * PI * C);
    let gxx = pre_xx * e * (1.0 + s + s * s) / s3;
    let gzz = pre_zz * e * (1.0 + s) / s3;
    let dgxx = pre_xx * e * (-3.0 - 3.0 * s - 2.0 * s * s - s3) / s4;
    let dgzz = pre_zz * e * (-3.0 - 3.0 * s - s * s) / s4;
    ([gxx, gzz], [dgxx, dgzz])
}

/// Complex closed forms off the imaginary axis, `x = 2ωz/c`.
fn pec_complex(omega: Complex64, x: Complex64) -> ([Complex64; 2], [Complex64; 2]) {
    let i = Complex64::new(0.0, 1.0);
    let e = (i * x).exp();
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x3 * x;
    let pre_xx = omega / (4.0 * PI * C);
    let pre_zz = omega / (2.0 * PI * C);
    let gxx = pre_xx * e * (1.0 - i * x - x2) / x3;
    let gzz = pre_zz * e * (1.0 - i * x) / x3;
    let dgxx = pre_xx * e * (-3.0 + 3.0 * i * x + 2.0 * x2 - i * x3) / x4;
    let dgzz = pre_zz * e * (x2 - 3.0 + 3.0 * i * x) / x4;
    ([gxx, gzz], [dgxx, dgzz])
}

/// `(G_xx, G_zz)` of the perfect electric mirror and their z-derivatives.
fn pec_components(z_a: f64, freq: Frequency) -> ([Complex64; 2], [Complex64; 2]) {
    match freq {
        Frequency::Imaginary(xi) => {
            let s = 2.0 * xi * z_a / C;
            let ds_dz = 2.0 * xi / C;
            let (g, dg) = pec_imaginary(xi, s);
            (
                [Complex64::from(g[0]), Complex64::from(g[1])],
                [
                    Complex64::from(dg[0] * ds_dz),
                    Complex64::from(dg[1] * ds_dz),
                ],
            )
        }
        other => {
            let omega = other.as_complex();
            let x = 2.0 * omega * z_a / C;
            let dx_dz = 2.0 * omega / C;
            let (g, dg) = pec_complex(omega, x);
            (g, [dg[0] * dx_dz, dg[1] * dx_dz])
        }
    }
}

fn require_mirror(geometry: &PlanarGeometry, freq: Frequency) -> Result<f64> {
    check_field_frequency(freq)?;
    if !(geometry.z_a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "observation distance must be positive, got {}",
            geometry.z_a
        )));
    }
    mirror_sign(&geometry.reflector).ok_or_else(|| {
        Error::Unsupported("closed-form Green tensor needs a perfect mirror reflector".into())
    })
}

/// Diagonal components of `G⁽¹⁾(z_A, z_A, ω)` for a perfect mirror.
///
/// With `z̃ = 2ωz_A/c` the perfect electric mirror gives
/// `G_xx = G_yy = ω e^{iz̃}(1 − iz̃ − z̃²)/(4πc z̃³)` and
/// `G_zz = ω e^{iz̃}(1 − iz̃)/(2πc z̃³)`; a perfect magnetic mirror flips
/// the overall sign. On the imaginary axis the real continuation is used
/// directly so the result is exactly real.
pub fn mirror_green_components(
    geometry: &PlanarGeometry,
    freq: Frequency,
) -> Result<MirrorComponents> {
    let sign = require_mirror(geometry, freq)?;
    let ([gxx, gzz], _) = pec_components(geometry.z_a, freq);
    Ok(MirrorComponents {
        xx: gxx * sign,
        yy: gxx * sign,
        zz: gzz * sign,
    })
}

fn mirror_trace_e(sign: f64, z_a: f64, freq: Frequency) -> (Complex64, Complex64) {
    let ([gxx, gzz], [dxx, dzz]) = pec_components(z_a, freq);
    ((2.0 * gxx + gzz) * sign, (2.0 * dxx + dzz) * sign)
}

/// Curl-curl trace for a perfect mirror, `−(ω/c)²·Tr G⁽¹⁾` of the dual mirror.
pub fn mirror_curlcurl_trace(geometry: &PlanarGeometry, freq: Frequency) -> Result<Complex64> {
    let sign = require_mirror(geometry, freq)?;
    let (dual_trace, _) = mirror_trace_e(-sign, geometry.z_a, freq);
    Ok(-k_squared(freq) * dual_trace)
}

fn mirror_traces(sign: f64, geometry: &PlanarGeometry, freq: Frequency) -> GreenTrace {
    let (te, _) = mirror_trace_e(sign, geometry.z_a, freq);
    let (te_dual, _) = mirror_trace_e(-sign, geometry.z_a, freq);
    let mut trace_m = -k_squared(freq) * te_dual;
    let mut trace_e = te;
    if let Frequency::Imaginary(_) = freq {
        trace_e.im = 0.0;
        trace_m.im = 0.0;
    }
    GreenTrace {
        freq,
        trace_e,
        trace_m,
        error_e: 0.0,
        error_m: 0.0,
    }
}

/// Traces for any supported reflector: closed forms for perfect mirrors,
/// Sommerfeld integrals for material half-spaces, exact zero for vacuum.
pub fn green_traces(
    geometry: &PlanarGeometry,
    freq: Frequency,
    config: &QuadratureConfig,
) -> Result<GreenTrace> {
    check_field_frequency(freq)?;
    match mirror_sign(&geometry.reflector) {
        Some(sign) => Ok(mirror_traces(sign, geometry, freq)),
        None => halfspace_green_traces(geometry, freq, config),
    }
}

/// Reflector seen by the Sommerfeld integrand.
enum Surface<'a> {
    Mirror { r_s: f64, r_p: f64 },
    Medium(&'a DrudeLorentz),
}

impl<'a> Surface<'a> {
    fn of(reflector: &'a MaterialResponse) -> Self {
        match reflector {
            MaterialResponse::PerfectElectricMirror => Surface::Mirror {
                r_s: -1.0,
                r_p: 1.0,
            },
            MaterialResponse::PerfectMagneticMirror => Surface::Mirror {
                r_s: 1.0,
                r_p: -1.0,
            },
            MaterialResponse::DrudeLorentz(m) => Surface::Medium(m),
        }
    }
}

/// Square root on the branch with non-negative imaginary part.
fn sqrt_upper(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Raw Sommerfeld integrals, before the geometric prefactors are applied.
struct Integrals {
    /// `[trace_e, trace_m, ∂trace_e, ∂trace_m]` in the normalised form.
    value: [Complex64; 4],
    error: [f64; 4],
}

fn combine<const N: usize>(
    parts: &[QuadratureResult<[Complex64; N]>],
) -> ([Complex64; N], [f64; N]) {
    let mut v = [Complex64::new(0.0, 0.0); N];
    let mut e = [0.0; N];
    for p in parts {
        for i in 0..N {
            v[i] += p.value[i];
            e[i] += p.abs_error_estimate[i];
        }
    }
    (v, e)
}

/// Imaginary-axis traces in the variable `u = 2κz` with `s = 2ξz/c`:
///
/// `Tr G⁽¹⁾ = e^{−s}/(8πz s²) ∫₀^∞ e^{−w}[s²(r_s + r_p) − 2u² r_p] dw`,
/// `Tr ∇×G⁽¹⁾×∇′ = e^{−s}/(32πz³) ∫₀^∞ e^{−w}[s²(r_s + r_p) − 2u² r_s] dw`,
/// where `u = s + w`. The z-derivatives carry an extra `−u/z`.
fn sommerfeld_imaginary(
    surface: &Surface<'_>,
    z: f64,
    xi: f64,
    config: &QuadratureConfig,
) -> Result<([f64; 4], [f64; 4])> {
    let s = 2.0 * xi * z / C;
    let (eps, mu) = match surface {
        Surface::Mirror { .. } => (f64::INFINITY, 1.0),
        Surface::Medium(m) => {
            let f = Frequency::Imaginary(xi);
            let (e, u) = (m.permittivity(f).re, m.permeability(f).re);
            if !(e > 0.0 && u > 0.0) {
                return Err(Error::Unsupported(format!(
                    "reflector response at iξ must be positive (ε = {e}, μ = {u}); the environment must be absorbing"
                )));
            }
            (e, u)
        }
    };
    let contrast = (eps * mu - 1.0) * s * s;
    let coefficients = |u: f64| -> (f64, f64) {
        match surface {
            Surface::Mirror { r_s, r_p } => (*r_s, *r_p),
            Surface::Medium(_) => {
                let u1 = (u * u + contrast).sqrt();
                (
                    (mu * u - u1) / (mu * u + u1),
                    (eps * u - u1) / (eps * u + u1),
                )
            }
        }
    };
    let s2 = s * s;
    let integrand = |w: f64| -> [f64; 4] {
        let u = s + w;
        let (rs, rp) = coefficients(u);
        let damp = (-w).exp();
        let a = s2 * (rs + rp) - 2.0 * u * u * rp;
        let b = s2 * (rs + rp) - 2.0 * u * u * rs;
        [damp * a, damp * b, damp * u * a, damp * u * b]
    };
    let r = integrate_semi_infinite(integrand, 1.0, config)?;

    let e = (-s).exp();
    let scale = [
        e / (8.0 * PI * z * s2),
        e / (32.0 * PI * z * z * z),
        -e / (8.0 * PI * z * z * s2),
        -e / (32.0 * PI * z * z * z * z),
    ];
    Ok((
        std::array::from_fn(|i| r.value[i] * scale[i]),
        std::array::from_fn(|i| r.abs_error_estimate[i] * scale[i].abs()),
    ))
}

/// Real-frequency traces, split at the light line `k_∥ = k`.
///
/// Propagating part (`k_∥ = k sin θ`):
/// `(ik/4π) ∫₀^{π/2} sin θ e^{ix cos θ}[r_s − r_p cos 2θ] dθ`;
/// evanescent part (`v = 2κz`):
/// `1/(8πz) ∫₀^∞ e^{−v}[r_s + r_p(1 + 2v²/x²)] dv`, with `x = 2kz`.
/// The curl-curl trace is `−k²` times the same with `r_s ↔ r_p`.
fn sommerfeld_real(
    surface: &Surface<'_>,
    z: f64,
    omega: f64,
    config: &QuadratureConfig,
) -> Result<Integrals> {
    let k = omega / C;
    let x = 2.0 * k * z;
    let (eps, mu) = match surface {
        Surface::Mirror { .. } => (Complex64::from(f64::INFINITY), Complex64::from(1.0)),
        Surface::Medium(m) => {
            let f = Frequency::Real(omega);
            let (e, u) = (m.permittivity(f), m.permeability(f));
            let lossy = (e.im > 0.0 || u.im > 0.0) && e.im >= 0.0 && u.im >= 0.0;
            if !lossy {
                return Err(Error::Unsupported(format!(
                    "real-frequency half-space evaluation needs an absorbing reflector at ω = {omega:e} (ε = {e}, μ = {u})"
                )));
            }
            (e, u)
        }
    };
    let n2 = eps * mu;
    // Coefficients in terms of the normalised normal wavevectors k_z/k, k_z1/k.
    let coefficients = |kz: Complex64| -> (Complex64, Complex64) {
        match surface {
            Surface::Mirror { r_s, r_p } => (Complex64::from(*r_s), Complex64::from(*r_p)),
            Surface::Medium(_) => {
                let kz1 = sqrt_upper(n2 - 1.0 + kz * kz);
                (
                    (mu * kz - kz1) / (mu * kz + kz1),
                    (eps * kz - kz1) / (eps * kz + kz1),
                )
            }
        }
    };

    let i = Complex64::new(0.0, 1.0);
    let propagating = |theta: f64| -> [Complex64; 4] {
        let (sin_t, cos_t) = theta.sin_cos();
        let (rs, rp) = coefficients(Complex64::from(cos_t));
        let cos2 = cos_t * cos_t - sin_t * sin_t;
        let phase = (i * x * cos_t).exp() * sin_t;
        let a = (rs - rp * cos2) * phase;
        let b = (rp - rs * cos2) * phase;
        let dz = i * 2.0 * k * cos_t;
        [a, b, a * dz, b * dz]
    };
    let evanescent = |v: f64| -> [Complex64; 4] {
        let (rs, rp) = coefficients(i * (v / x));
        let damp = (-v).exp();
        let g = 1.0 + 2.0 * v * v / (x * x);
        let a = (rs + rp * g) * damp;
        let b = (rp + rs * g) * damp;
        [a, b, a * v, b * v]
    };

    let prop = integrate_finite(propagating, 0.0, 0.5 * PI, config)?;
    let evan = integrate_semi_infinite(evanescent, 1.0, config)?;

    let k2 = k * k;
    let pre_prop = i * k / (4.0 * PI);
    let pre_evan = 1.0 / (8.0 * PI * z);
    let prop_scale = [pre_prop, -k2 * pre_prop, pre_prop, -k2 * pre_prop];
    let evan_scale = [
        Complex64::from(pre_evan),
        Complex64::from(-k2 * pre_evan),
        Complex64::from(-pre_evan / z),
        Complex64::from(k2 * pre_evan / z),
    ];
    let scaled = |r: &QuadratureResult<[Complex64; 4]>, sc: &[Complex64; 4]| QuadratureResult {
        value: std::array::from_fn(|j| r.value[j] * sc[j]),
        abs_error_estimate: std::array::from_fn(|j| r.abs_error_estimate[j] * sc[j].norm()),
        evaluations: r.evaluations,
    };
    let (value, error) = combine(&[scaled(&prop, &prop_scale), scaled(&evan, &evan_scale)]);
    Ok(Integrals { value, error })
}

fn sommerfeld(
    geometry: &PlanarGeometry,
    freq: Frequency,
    config: &QuadratureConfig,
) -> Result<Integrals> {
    check_field_frequency(freq)?;
    let surface = Surface::of(&geometry.reflector);
    match freq {
        Frequency::Imaginary(xi) => {
            let (v, e) = sommerfeld_imaginary(&surface, geometry.z_a, xi, config)?;
            Ok(Integrals {
                value: v.map(Complex64::from),
                error: e,
            })
        }
        Frequency::Real(w) => sommerfeld_real(&surface, geometry.z_a, w, config),
        Frequency::Complex(_) => Err(Error::Unsupported(
            "Sommerfeld traces are evaluated on the real or imaginary axis only".into(),
        )),
    }
}

/// Traces from the transverse-wavevector (Sommerfeld) integral over the
/// Fresnel coefficients of the reflector. Perfect mirrors are handled with
/// their limiting coefficients, which makes this an independent check of
/// the closed forms.
pub fn halfspace_green_traces(
    geometry: &PlanarGeometry,
    freq: Frequency,
    config: &QuadratureConfig,
) -> Result<GreenTrace> {
    check_field_frequency(freq)?;
    if geometry.reflector.is_vacuum() {
        return Ok(GreenTrace {
            freq,
            trace_e: Complex64::new(0.0, 0.0),
            trace_m: Complex64::new(0.0, 0.0),
            error_e: 0.0,
            error_m: 0.0,
        });
    }
    let r = sommerfeld(geometry, freq, config)?;
    Ok(GreenTrace {
        freq,
        trace_e: r.value[0],
        trace_m: r.value[1],
        error_e: r.error[0],
        error_m: r.error[1],
    })
}

/// `∂/∂z_A` of both traces: analytic for mirrors, differentiated under the
/// Sommerfeld integral for half-spaces.
pub fn d_dz_traces(
    geometry: &PlanarGeometry,
    freq: Frequency,
    config: &QuadratureConfig,
) -> Result<TraceDerivative> {
    check_field_frequency(freq)?;
    if let Some(sign) = mirror_sign(&geometry.reflector) {
        let (_, de) = mirror_trace_e(sign, geometry.z_a, freq);
        let (_, de_dual) = mirror_trace_e(-sign, geometry.z_a, freq);
        let mut d_trace_e = de;
        let mut d_trace_m = -k_squared(freq) * de_dual;
        if let Frequency::Imaginary(_) = freq {
            d_trace_e.im = 0.0;
            d_trace_m.im = 0.0;
        }
        return Ok(TraceDerivative {
            d_trace_e,
            d_trace_m,
            error_e: 0.0,
            error_m: 0.0,
        });
    }
    if geometry.reflector.is_vacuum() {
        return Ok(TraceDerivative {
            d_trace_e: Complex64::new(0.0, 0.0),
            d_trace_m: Complex64::new(0.0, 0.0),
            error_e: 0.0,
            error_m: 0.0,
        });
    }
    let r = sommerfeld(geometry, freq, config)?;
    Ok(TraceDerivative {
        d_trace_e: r.value[2],
        d_trace_m: r.value[3],
        error_e: r.error[2],
        error_m: r.error[3],
    })
}

/// Finite-difference step for z-derivatives: `max(10⁻⁶·z_A, 10⁻¹² m)`.
pub fn fd_step(z_a: f64) -> f64 {
    (1e-6 * z_a).max(1e-12)
}

/// Central-difference derivative of the traces, Richardson-extrapolated
/// from steps `h` and `h/2`, with `h` from [`fd_step`]. The error estimate
/// is the difference between the extrapolated and the finer estimate.
pub fn d_dz_traces_fd(
    geometry: &PlanarGeometry,
    freq: Frequency,
    config: &QuadratureConfig,
) -> Result<TraceDerivative> {
    let h = fd_step(geometry.z_a);
    if h >= geometry.z_a {
        return Err(Error::InvalidParameter(format!(
            "distance {} too small for the finite-difference step",
            geometry.z_a
        )));
    }
    let eval = |z: f64| -> Result<GreenTrace> { green_traces(&geometry.at(z)?, freq, config) };
    let central = |step: f64| -> Result<(Complex64, Complex64)> {
        let up = eval(geometry.z_a + step)?;
        let down = eval(geometry.z_a - step)?;
        Ok((
            (up.trace_e - down.trace_e) / (2.0 * step),
            (up.trace_m - down.trace_m) / (2.0 * step),
        ))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let rich = |c: Complex64, f: Complex64| (4.0 * f - c) / 3.0;
    let de = rich(coarse.0, fine.0);
    let dm = rich(coarse.1, fine.1);
    Ok(TraceDerivative {
        d_trace_e: de,
        d_trace_m: dm,
        error_e: (de - fine.0).norm(),
        error_m: (dm - fine.1).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const W10: f64 = 2.0e15;

    fn pec(z: f64) -> PlanarGeometry {
        PlanarGeometry::new(MaterialResponse::PerfectElectricMirror, z).unwrap()
    }

    /// Distance giving `z̃ = 2ωz/c = zt`.
    fn z_for(zt: f64, w: f64) -> f64 {
        zt * C / (2.0 * w)
    }

    fn tight() -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_evals: 200_000,
        }
    }

    #[test]
    fn mirror_at_unit_z_tilde() {
        // Re[(1 − i − 1)e^{i}] = sin 1.
        let g = mirror_green_components(&pec(z_for(1.0, W10)), Frequency::Real(W10)).unwrap();
        let expected = W10 * 1f64.sin() / (4.0 * PI * C);
        assert!((g.xx.re / expected - 1.0).abs() < 1e-13);
        assert_eq!(g.xx, g.yy);
    }

    #[test]
    fn mirror_imaginary_axis_values() {
        // ξz/c = 1 → s = 2: G_xx = −ξe^{−2}·7/(32πc), G_zz = −ξe^{−2}·3/(16πc).
        let xi = W10;
        let g = mirror_green_components(&pec(C / xi), Frequency::Imaginary(xi)).unwrap();
        let e2 = (-2.0f64).exp();
        let xx = -xi * e2 * 7.0 / (32.0 * PI * C);
        let zz = -xi * e2 * 3.0 / (16.0 * PI * C);
        assert_eq!(g.xx.im, 0.0);
        assert!((g.xx.re / xx - 1.0).abs() < 1e-14);
        assert!((g.zz.re / zz - 1.0).abs() < 1e-14);
        // Continuation of the complex closed form agrees.
        let gc =
            mirror_green_components(&pec(C / xi), Frequency::Complex(Complex64::new(1e-30, xi)))
                .unwrap();
        assert!((gc.xx - g.xx).norm() < 1e-12 * g.xx.norm());
    }

    #[test]
    fn magnetic_mirror_flips_sign() {
        let z = z_for(0.7, W10);
        let e = mirror_green_components(&pec(z), Frequency::Real(W10)).unwrap();
        let m = mirror_green_components(
            &PlanarGeometry::new(MaterialResponse::PerfectMagneticMirror, z).unwrap(),
            Frequency::Real(W10),
        )
        .unwrap();
        assert_eq!(m.xx, -e.xx);
        assert_eq!(m.zz, -e.zz);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PlanarGeometry::new(MaterialResponse::PerfectElectricMirror, 0.0).is_err());
        assert!(PlanarGeometry::new(MaterialResponse::PerfectElectricMirror, -1e-9).is_err());
        let half = PlanarGeometry::new(MaterialResponse::constant(4.0, 1.0), 1e-7).unwrap();
        assert!(matches!(
            mirror_green_components(&half, Frequency::Real(W10)),
            Err(Error::Unsupported(_))
        ));
        assert!(mirror_green_components(&pec(1e-7), Frequency::Real(0.0)).is_err());
        assert!(mirror_green_components(&pec(1e-7), Frequency::Imaginary(0.0)).is_err());
    }

    #[test]
    fn sommerfeld_reproduces_mirror_imaginary() {
        for zt in [0.05, 1.0, 12.0] {
            let g = pec(z_for(zt, W10));
            let f = Frequency::Imaginary(W10);
            let closed = green_traces(&g, f, &tight()).unwrap();
            let som = halfspace_green_traces(&g, f, &tight()).unwrap();
            assert!(
                (som.trace_e.re / closed.trace_e.re - 1.0).abs() < 1e-11,
                "{zt}"
            );
            assert!(
                (som.trace_m.re / closed.trace_m.re - 1.0).abs() < 1e-11,
                "{zt}"
            );
            let dc = d_dz_traces(&g, f, &tight()).unwrap();
            let r = sommerfeld(&g, f, &tight()).unwrap();
            assert!((r.value[2].re / dc.d_trace_e.re - 1.0).abs() < 1e-11);
            assert!((r.value[3].re / dc.d_trace_m.re - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn sommerfeld_reproduces_mirror_real() {
        for zt in [0.1, 1.0, 5.0, 20.0] {
            let g = pec(z_for(zt, W10));
            let f = Frequency::Real(W10);
            let closed = green_traces(&g, f, &tight()).unwrap();
            let som = halfspace_green_traces(&g, f, &tight()).unwrap();
            assert!(
                (som.trace_e - closed.trace_e).norm() < 1e-10 * closed.trace_e.norm(),
                "{zt}"
            );
            assert!(
                (som.trace_m - closed.trace_m).norm() < 1e-10 * closed.trace_m.norm(),
                "{zt}"
            );
            let dc = d_dz_traces(&g, f, &tight()).unwrap();
            let r = sommerfeld(&g, f, &tight()).unwrap();
            assert!((r.value[2] - dc.d_trace_e).norm() < 1e-10 * dc.d_trace_e.norm());
            assert!((r.value[3] - dc.d_trace_m).norm() < 1e-10 * dc.d_trace_m.norm());
        }
    }

    #[test]
    fn vacuum_traces_are_zero() {
        let g = PlanarGeometry::new(MaterialResponse::vacuum(), 1e-7).unwrap();
        for f in [Frequency::Imaginary(W10), Frequency::Real(W10)] {
            let t = green_traces(&g, f, &tight()).unwrap();
            assert_eq!(t.trace_e, Complex64::new(0.0, 0.0));
            assert_eq!(t.trace_m, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn curlcurl_sign_on_imaginary_axis() {
        let g = pec(z_for(0.01, W10));
        let f = Frequency::Imaginary(W10);
        let t = green_traces(&g, f, &tight()).unwrap();
        assert!(t.trace_e.re < 0.0);
        // (ω/c)² = −ξ²/c², so the curl-curl trace of a PEC is positive here.
        assert!(t.trace_m.re > 0.0);
        let cc = mirror_curlcurl_trace(&g, f).unwrap();
        assert!((cc.re - t.trace_m.re).abs() <= 1e-15 * cc.re.abs());
    }

    #[test]
    fn analytic_derivative_matches_richardson() {
        for zt in [0.5, 1.0, 5.0] {
            for f in [Frequency::Real(W10), Frequency::Imaginary(W10)] {
                let g = pec(z_for(zt, W10));
                let a = d_dz_traces(&g, f, &tight()).unwrap();
                let n = d_dz_traces_fd(&g, f, &tight()).unwrap();
                assert!((a.d_trace_e - n.d_trace_e).norm() <= 1e-6 * a.d_trace_e.norm());
                assert!((a.d_trace_m - n.d_trace_m).norm() <= 1e-6 * a.d_trace_m.norm());
            }
        }
    }

    #[test]
    fn lossless_medium_rejected_at_real_frequency() {
        let g = PlanarGeometry::new(MaterialResponse::constant(4.0, 1.0), 1e-7).unwrap();
        assert!(matches!(
            halfspace_green_traces(&g, Frequency::Real(W10), &tight()),
            Err(Error::Unsupported(_))
        ));
    }
}
