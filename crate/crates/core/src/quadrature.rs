//! Adaptive Gauss-Kronrod quadrature with certified error estimates.
//!
//! A single globally adaptive driver (bisection of the worst interval, the
//! QAG strategy) handles finite intervals directly and semi-infinite ones
//! through the map `x = a + scale·t/(1 − t)`. Integrands may be real,
//! complex, or small fixed-size vectors of either; vector integrands
//! converge component-wise, so components of wildly different magnitude
//! each meet their own relative tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Magnitudes of a quadrature value, one per convergence-checked component.
pub trait Magnitudes: Copy + std::fmt::Debug {
    fn splat(v: f64) -> Self;
    fn map(self, f: impl Fn(f64) -> f64) -> Self;
    fn zip_with(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self;
    fn zip3(self, b: Self, c: Self, f: impl Fn(f64, f64, f64) -> f64) -> Self;
    fn as_slice(&self) -> &[f64];
}

impl Magnitudes for f64 {
    fn splat(v: f64) -> Self {
        v
    }
    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        f(self)
    }
    fn zip_with(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        f(self, other)
    }
    fn zip3(self, b: Self, c: Self, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        f(self, b, c)
    }
    fn as_slice(&self) -> &[f64] {
        std::slice::from_ref(self)
    }
}

impl<const N: usize> Magnitudes for [f64; N] {
    fn splat(v: f64) -> Self {
        [v; N]
    }
    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        std::array::from_fn(|i| f(self[i]))
    }
    fn zip_with(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        std::array::from_fn(|i| f(self[i], other[i]))
    }
    fn zip3(self, b: Self, c: Self, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        std::array::from_fn(|i| f(self[i], b[i], c[i]))
    }
    fn as_slice(&self) -> &[f64] {
        self
    }
}

/// A value that can be integrated: a vector space over `f64` with a
/// component-wise magnitude.
pub trait QuadValue: Copy {
    type Mag: Magnitudes;
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn magnitude(&self) -> Self::Mag;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    type Mag = f64;
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    type Mag = f64;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    type Mag = [f64; N];
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i] + other[i])
    }
    fn scale(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
    fn magnitude(&self) -> Self::Mag {
        self.map(f64::abs)
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl<const N: usize> QuadValue for [Complex64; N] {
    type Mag = [f64; N];
    fn zero() -> Self {
        [Complex64::new(0.0, 0.0); N]
    }
    fn add(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i] + other[i])
    }
    fn scale(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
    fn magnitude(&self) -> Self::Mag {
        self.map(|v| v.norm())
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance on each component.
    pub rel_tol: f64,
    /// Absolute floor, in the integral's units.
    pub abs_tol: f64,
    /// Maximum number of integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-30,
            max_evals: 100_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Configuration for an integral nested inside this one: tolerance
    /// tightened tenfold so the inner error stays below the outer budget.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: self.rel_tol / 10.0,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "relative tolerance must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "absolute tolerance must be non-negative, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult<T: QuadValue> {
    pub value: T,
    pub abs_error_estimate: T::Mag,
    pub evaluations: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
// Odd indices of XGK are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const EVALS_PER_RULE: usize = 21;

#[derive(Debug, Clone, Copy)]
struct Segment<T: QuadValue> {
    a: f64,
    b: f64,
    value: T,
    error: T::Mag,
    /// Integral of |f| over the segment.
    resabs: T::Mag,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn checked<T: QuadValue>(x: f64, v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { x })
    }
}

fn gk21<T, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = checked(center, f(center))?;
    let mut resk = fc.scale(WGK[10]);
    let mut resg = T::zero();
    let mut resabs = fc.magnitude().map(|m| m * WGK[10]);

    let mut values = [(fc, fc); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = checked(center - dx, f(center - dx))?;
        let f2 = checked(center + dx, f(center + dx))?;
        let pair = f1.add(f2);
        resk = resk.add(pair.scale(WGK[j]));
        if j % 2 == 1 {
            resg = resg.add(pair.scale(WG[j / 2]));
        }
        let (m1, m2) = (f1.magnitude(), f2.magnitude());
        resabs = resabs.zip_with(m1.zip_with(m2, |x, y| x + y), |acc, s| acc + WGK[j] * s);
        values[j] = (f1, f2);
    }

    let mean = resk.scale(0.5);
    let dev = |v: T| v.add(mean.scale(-1.0)).magnitude();
    let mut resasc = dev(fc).map(|m| m * WGK[10]);
    for j in 0..10 {
        let (f1, f2) = values[j];
        let s = dev(f1).zip_with(dev(f2), |x, y| x + y);
        resasc = resasc.zip_with(s, |acc, s| acc + WGK[j] * s);
    }

    let width = half.abs();
    let resabs = resabs.map(|m| m * width);
    let resasc = resasc.map(|m| m * width);
    let error = resk
        .add(resg.scale(-1.0))
        .magnitude()
        .map(|m| m * width)
        .zip3(resabs, resasc, rescale_error);

    Ok(Segment {
        a,
        b,
        value: resk.scale(half),
        error,
        resabs,
    })
}

fn budget_error<T: QuadValue>(total: T, err: T::Mag, evaluations: usize) -> Error {
    let value = total.magnitude().as_slice()[0];
    let abs_error_estimate = err.as_slice().iter().cloned().fold(0.0, f64::max);
    Error::NotConverged {
        value,
        abs_error_estimate,
        evaluations,
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Converges when, for every component, the summed error estimate is below
/// `max(rel_tol·|value|, abs_tol)`, or below twice the rounding floor
/// `50ε∫|f|` when cancellation makes the relative target unreachable. Running out of evaluation budget is an
/// error carrying the achieved estimate.
pub fn integrate_finite<T, F>(
    mut f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    config.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a > b {
        return Err(Error::InvalidParameter(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            abs_error_estimate: T::Mag::splat(0.0),
            evaluations: 0,
        });
    }

    let mut segments = vec![gk21(&mut f, a, b)?];
    let mut evaluations = EVALS_PER_RULE;

    loop {
        let (total, total_err) = segments
            .iter()
            .fold((T::zero(), T::Mag::splat(0.0)), |(v, e), s| {
                (v.add(s.value), e.zip_with(s.error, |x, y| x + y))
            });
        let total_abs = segments.iter().fold(T::Mag::splat(0.0), |acc, s| {
            acc.zip_with(s.resabs, |x, y| x + y)
        });
        // When |∫f| ≪ ∫|f| the relative target can sit below rounding; an
        // error at the rounding floor is then the best attainable.
        let allowed = total.magnitude().zip_with(total_abs, |m, abs| {
            (config.rel_tol * m)
                .max(config.abs_tol)
                .max(100.0 * f64::EPSILON * abs)
        });

        let converged = total_err
            .as_slice()
            .iter()
            .zip(allowed.as_slice())
            .all(|(e, tol)| e <= tol);
        if converged {
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: total_err,
                evaluations,
            });
        }
        if evaluations + 2 * EVALS_PER_RULE > config.max_evals {
            return Err(budget_error(total, total_err, evaluations));
        }

        let badness = |s: &Segment<T>| -> f64 {
            s.error
                .as_slice()
                .iter()
                .zip(allowed.as_slice())
                .map(|(e, tol)| e / tol.max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        };
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| badness(x).total_cmp(&badness(y)))
            .map(|(i, _)| i)
            .expect("at least one segment");

        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval can no longer be split in floating point.
            segments.push(seg);
            let (total, total_err) = segments
                .iter()
                .fold((T::zero(), T::Mag::splat(0.0)), |(v, e), s| {
                    (v.add(s.value), e.zip_with(s.error, |x, y| x + y))
                });
            return Err(budget_error(total, total_err, evaluations));
        }
        segments.push(gk21(&mut f, seg.a, mid)?);
        segments.push(gk21(&mut f, mid, seg.b)?);
        evaluations += 2 * EVALS_PER_RULE;
    }
}

/// Integrates `f` over `[lower, ∞)`.
///
/// The half-line is mapped onto `[0, 1)` by `x = lower + scale·t/(1 − t)`;
/// `scale` should be of the order of the integrand's decay length.
pub fn integrate_semi_infinite_from<T, F>(
    mut f: F,
    lower: f64,
    scale: f64,
    config: &QuadratureConfig,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "decay scale must be positive and finite, got {scale}"
        )));
    }
    if !lower.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lower bound must be finite, got {lower}"
        )));
    }
    let mapped = |t: f64| -> T {
        let one_minus = 1.0 - t;
        let x = lower + scale * t / one_minus;
        let jacobian = scale / (one_minus * one_minus);
        let v = f(x);
        if jacobian.is_finite() {
            v.scale(jacobian)
        } else {
            T::zero()
        }
    };
    integrate_finite(mapped, 0.0, 1.0, config)
}

/// Integrates `f` over `[0, ∞)`; see [`integrate_semi_infinite_from`].
pub fn integrate_semi_infinite<T, F>(
    f: F,
    scale: f64,
    config: &QuadratureConfig,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_semi_infinite_from(f, 0.0, scale, config)
}
