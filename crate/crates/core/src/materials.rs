//! Atomic response functions and reflector media.
//!
//! Transition frequencies are signed, `ω_nk = (E_n − E_k)/ħ`: a positive
//! value is a downward transition out of the state the atom occupies. A
//! ground-state model therefore has only negative `ω_nk`.

use std::path::Path;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{EPSILON_0, HBAR, MU_0};
use crate::error::{Error, Result};

/// Threshold on |ε − 1| (and |1 − 1/μ|) above which the linearised
/// Clausius-Mossotti map is flagged as leaving the dilute regime.
pub const DEFAULT_DILUTE_GUARD: f64 = 0.1;

/// Angular frequency at which a response function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    /// `ω = iξ` with `ξ ≥ 0`.
    Imaginary(f64),
    /// Real `ω`.
    Real(f64),
    /// General complex `ω` in the upper half-plane.
    Complex(Complex64),
}

impl Frequency {
    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Frequency::Imaginary(xi) => Complex64::new(0.0, xi),
            Frequency::Real(w) => Complex64::new(w, 0.0),
            Frequency::Complex(z) => z,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            Frequency::Imaginary(xi) if !(xi >= 0.0 && xi.is_finite()) => Err(
                Error::InvalidParameter(format!("imaginary frequency must be ξ ≥ 0, got {xi}")),
            ),
            Frequency::Real(w) if !w.is_finite() => Err(Error::InvalidParameter(format!(
                "real frequency must be finite, got {w}"
            ))),
            Frequency::Complex(z) if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) => {
                Err(Error::InvalidParameter(format!(
                    "complex frequency must lie in the open upper half-plane, got {z}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Signed transition frequency `ω_nk`, rad/s.
    #[serde(rename = "omega_nk_rad_s")]
    pub omega_nk: f64,
    /// `|d_nk|²`, C²·m².
    #[serde(rename = "dipole_sq_C2m2", default)]
    pub dipole_sq: f64,
    /// `|m_nk|²`, (A·m²)².
    #[serde(rename = "magnetic_sq_A2m4", default)]
    pub magnetic_sq: f64,
}

impl Transition {
    pub fn new(omega_nk: f64, dipole_sq: f64, magnetic_sq: f64) -> Result<Self> {
        let t = Self {
            omega_nk,
            dipole_sq,
            magnetic_sq,
        };
        t.validate()?;
        Ok(t)
    }

    /// Purely electric transition.
    pub fn electric(omega_nk: f64, dipole_sq: f64) -> Result<Self> {
        Self::new(omega_nk, dipole_sq, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_nk.is_finite() && self.omega_nk != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transition frequency must be finite and nonzero, got {}",
                self.omega_nk
            )));
        }
        for (name, v) in [
            ("dipole_sq", self.dipole_sq),
            ("magnetic_sq", self.magnetic_sq),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.dipole_sq == 0.0 && self.magnetic_sq == 0.0 {
            return Err(Error::InvalidParameter(
                "transition has neither electric nor magnetic strength".into(),
            ));
        }
        Ok(())
    }

    /// `ω_kn = −ω_nk`, the frequency appearing in the response denominators.
    fn omega_kn(&self) -> f64 {
        -self.omega_nk
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomKind {
    #[default]
    Isotropic,
}

/// An isotropic atom prepared in state `state_label`, described by its
/// transitions to all other levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    pub state_label: String,
    pub transitions: Vec<Transition>,
    #[serde(default)]
    pub kind: AtomKind,
}

impl AtomModel {
    pub fn new(state_label: impl Into<String>, transitions: Vec<Transition>) -> Result<Self> {
        let atom = Self {
            state_label: state_label.into(),
            transitions,
            kind: AtomKind::Isotropic,
        };
        atom.validate()?;
        Ok(atom)
    }

    /// Two-level electric atom in its ground state, transition `omega_10`.
    pub fn two_level_ground(omega_10: f64, dipole_sq: f64) -> Result<Self> {
        Self::new("ground", vec![Transition::electric(-omega_10, dipole_sq)?])
    }

    /// Two-level electric atom in its excited state, transition `omega_10`.
    pub fn two_level_excited(omega_10: f64, dipole_sq: f64) -> Result<Self> {
        Self::new("excited", vec![Transition::electric(omega_10, dipole_sq)?])
    }

    pub fn validate(&self) -> Result<()> {
        if self.transitions.is_empty() {
            return Err(Error::InvalidParameter(
                "atom model needs at least one transition".into(),
            ));
        }
        self.transitions.iter().try_for_each(Transition::validate)
    }

    /// True when no downward transition exists.
    pub fn is_ground_state(&self) -> bool {
        self.transitions.iter().all(|t| t.omega_nk < 0.0)
    }

    pub fn is_excited(&self) -> bool {
        !self.is_ground_state()
    }

    /// Single transition with no magnetic strength.
    pub fn is_two_level_electric(&self) -> bool {
        self.transitions.len() == 1 && self.transitions[0].magnetic_sq == 0.0
    }

    /// Largest `|ω_nk|`, the natural frequency scale of the atom.
    pub fn max_frequency(&self) -> f64 {
        self.transitions
            .iter()
            .map(|t| t.omega_nk.abs())
            .fold(0.0, f64::max)
    }

    /// Swaps electric and magnetic strengths, `|d|² ↔ |m|²/c²`.
    pub fn dual(&self) -> Self {
        use crate::constants::C;
        let c2 = C * C;
        Self {
            state_label: self.state_label.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    omega_nk: t.omega_nk,
                    dipole_sq: t.magnetic_sq / c2,
                    magnetic_sq: t.dipole_sq * c2,
                })
                .collect(),
            kind: self.kind,
        }
    }

    /// Parses an atom model from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let atom: AtomModel =
            toml::from_str(text).map_err(|e| Error::Config(format!("atom model: {e}")))?;
        atom.validate()
            .map_err(|e| Error::Config(format!("atom model: {e}")))?;
        Ok(atom)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

fn response_sum(
    atom: &AtomModel,
    freq: Frequency,
    broadening: f64,
    strength: impl Fn(&Transition) -> f64,
) -> Result<Complex64> {
    freq.validate()?;
    if !(broadening >= 0.0 && broadening.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "broadening must be finite and non-negative, got {broadening}"
        )));
    }

    let mut sum = Complex64::new(0.0, 0.0);
    match freq {
        Frequency::Imaginary(xi) => {
            // 1/(iξ + a) − 1/(iξ − a) = 2a/(a² + ξ²), real on the imaginary axis.
            let x = xi + broadening;
            for t in &atom.transitions {
                let a = t.omega_kn();
                sum += strength(t) * 2.0 * a / (a * a + x * x);
            }
        }
        Frequency::Real(w) => {
            for t in &atom.transitions {
                let a = t.omega_kn();
                if broadening == 0.0 && (w + a == 0.0 || w - a == 0.0) {
                    return Err(Error::Pole { omega: w });
                }
                let z = Complex64::new(w, broadening);
                sum += strength(t) * ((z + a).inv() - (z - a).inv());
            }
        }
        Frequency::Complex(z0) => {
            let z = z0 + Complex64::new(0.0, broadening);
            for t in &atom.transitions {
                let a = t.omega_kn();
                sum += strength(t) * ((z + a).inv() - (z - a).inv());
            }
        }
    }
    Ok(sum / (3.0 * HBAR))
}

/// Electric polarisability `α_n(ω + iε)`, C²·m²·J⁻¹.
///
/// `broadening` is the infinitesimal `ε` of the retarded response; it is
/// never chosen on the caller's behalf. Evaluating exactly on a transition
/// with zero broadening is rejected as a pole.
pub fn polarizability(atom: &AtomModel, freq: Frequency, broadening: f64) -> Result<Complex64> {
    response_sum(atom, freq, broadening, |t| t.dipole_sq)
}

/// Magnetisability `β_n(ω + iε)`, same structure as [`polarizability`]
/// with `|m_nk|²` in place of `|d_nk|²`.
pub fn magnetizability(atom: &AtomModel, freq: Frequency, broadening: f64) -> Result<Complex64> {
    response_sum(atom, freq, broadening, |t| t.magnetic_sq)
}

/// Weight of the delta function at a downward transition in `Im α` and
/// `Im β` (`π|d|²/3ħ` and `π|m|²/3ħ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantWeight {
    pub omega: f64,
    pub electric: f64,
    pub magnetic: f64,
}

/// Downward transitions and their resonant weights. Empty for a ground state.
pub fn resonant_weights(atom: &AtomModel) -> Vec<ResonantWeight> {
    let k = std::f64::consts::PI / (3.0 * HBAR);
    atom.transitions
        .iter()
        .filter(|t| t.omega_nk > 0.0)
        .map(|t| ResonantWeight {
            omega: t.omega_nk,
            electric: k * t.dipole_sq,
            magnetic: k * t.magnetic_sq,
        })
        .collect()
}

/// Electric and magnetic susceptibilities of a gas of atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibility {
    /// `ε − 1`.
    pub electric: Complex64,
    /// `1 − 1/μ`.
    pub magnetic: Complex64,
    pub dilute_guard_exceeded: bool,
}

/// Linearised Clausius-Mossotti map with the default dilute guard.
pub fn clausius_mossotti(
    eta: f64,
    atom: &AtomModel,
    freq: Frequency,
    broadening: f64,
) -> Result<Susceptibility> {
    clausius_mossotti_with_guard(eta, atom, freq, broadening, DEFAULT_DILUTE_GUARD)
}

/// `ε − 1 = ηα/ε₀`, `1 − 1/μ = μ₀ηβ`. Exceeding `guard` logs a warning and
/// sets `dilute_guard_exceeded`; it is not an error.
pub fn clausius_mossotti_with_guard(
    eta: f64,
    atom: &AtomModel,
    freq: Frequency,
    broadening: f64,
    guard: f64,
) -> Result<Susceptibility> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "number density must be finite and non-negative, got {eta}"
        )));
    }
    let alpha = polarizability(atom, freq, broadening)?;
    let beta = magnetizability(atom, freq, broadening)?;
    let electric = alpha * (eta / EPSILON_0);
    let magnetic = beta * (MU_0 * eta);
    let exceeded = electric.norm() > guard || magnetic.norm() > guard;
    if exceeded {
        warn!(
            "dilute guard exceeded: |ε−1| = {:.3e}, |1−1/μ| = {:.3e} (guard {guard})",
            electric.norm(),
            magnetic.norm()
        );
    }
    Ok(Susceptibility {
        electric,
        magnetic,
        dilute_guard_exceeded: exceeded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscillatorKind {
    #[default]
    Absorbing,
    /// Population-inverted line: contributes gain, `Im ε < 0`, across its width.
    Amplifying,
}

/// One Lorentz term `±ω_p²/(ω₀² − ω² − iγω)`; `resonance = 0` gives a Drude term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    /// Oscillator plasma frequency `ω_p`, rad/s.
    #[serde(rename = "strength_rad_s")]
    pub strength: f64,
    #[serde(rename = "resonance_rad_s")]
    pub resonance: f64,
    #[serde(rename = "damping_rad_s")]
    pub damping: f64,
    #[serde(default)]
    pub kind: OscillatorKind,
}

impl Oscillator {
    pub fn absorbing(strength: f64, resonance: f64, damping: f64) -> Self {
        Self {
            strength,
            resonance,
            damping,
            kind: OscillatorKind::Absorbing,
        }
    }

    pub fn amplifying(strength: f64, resonance: f64, damping: f64) -> Self {
        Self {
            kind: OscillatorKind::Amplifying,
            ..Self::absorbing(strength, resonance, damping)
        }
    }

    fn sign(&self) -> f64 {
        match self.kind {
            OscillatorKind::Absorbing => 1.0,
            OscillatorKind::Amplifying => -1.0,
        }
    }

    fn eval(&self, freq: Frequency) -> Complex64 {
        let wp2 = self.strength * self.strength;
        let w02 = self.resonance * self.resonance;
        match freq {
            Frequency::Imaginary(xi) => {
                Complex64::from(self.sign() * wp2 / (w02 + xi * xi + self.damping * xi))
            }
            other => {
                let w = other.as_complex();
                let i = Complex64::new(0.0, 1.0);
                self.sign() * wp2 / (w02 - w * w - i * self.damping * w)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("strength", self.strength),
            ("resonance", self.resonance),
            ("damping", self.damping),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "oscillator {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

fn one() -> f64 {
    1.0
}

/// Multi-oscillator Drude-Lorentz medium with independent ε and μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrudeLorentz {
    #[serde(default = "one")]
    pub eps_background: f64,
    #[serde(default = "one")]
    pub mu_background: f64,
    #[serde(default)]
    pub eps_oscillators: Vec<Oscillator>,
    #[serde(default)]
    pub mu_oscillators: Vec<Oscillator>,
}

impl Default for DrudeLorentz {
    fn default() -> Self {
        Self {
            eps_background: 1.0,
            mu_background: 1.0,
            eps_oscillators: Vec::new(),
            mu_oscillators: Vec::new(),
        }
    }
}

impl DrudeLorentz {
    /// Dispersionless medium.
    pub fn constant(eps: f64, mu: f64) -> Self {
        Self {
            eps_background: eps,
            mu_background: mu,
            ..Self::default()
        }
    }

    pub fn permittivity(&self, freq: Frequency) -> Complex64 {
        self.eps_oscillators
            .iter()
            .fold(Complex64::from(self.eps_background), |acc, o| {
                acc + o.eval(freq)
            })
    }

    pub fn permeability(&self, freq: Frequency) -> Complex64 {
        self.mu_oscillators
            .iter()
            .fold(Complex64::from(self.mu_background), |acc, o| {
                acc + o.eval(freq)
            })
    }

    pub fn is_vacuum(&self) -> bool {
        self.eps_background == 1.0
            && self.mu_background == 1.0
            && self
                .eps_oscillators
                .iter()
                .chain(&self.mu_oscillators)
                .all(|o| o.strength == 0.0)
    }

    pub fn is_purely_absorbing(&self) -> bool {
        self.eps_oscillators
            .iter()
            .chain(&self.mu_oscillators)
            .all(|o| o.kind == OscillatorKind::Absorbing || o.strength == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_background", self.eps_background),
            ("mu_background", self.mu_background),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        self.eps_oscillators
            .iter()
            .chain(&self.mu_oscillators)
            .try_for_each(Oscillator::validate)
    }

    fn dual(&self) -> Self {
        Self {
            eps_background: self.mu_background,
            mu_background: self.eps_background,
            eps_oscillators: self.mu_oscillators.clone(),
            mu_oscillators: self.eps_oscillators.clone(),
        }
    }
}

/// Optical response of the reflector occupying `z < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum MaterialResponse {
    PerfectElectricMirror,
    PerfectMagneticMirror,
    DrudeLorentz(DrudeLorentz),
}

impl MaterialResponse {
    pub fn vacuum() -> Self {
        MaterialResponse::DrudeLorentz(DrudeLorentz::default())
    }

    pub fn constant(eps: f64, mu: f64) -> Self {
        MaterialResponse::DrudeLorentz(DrudeLorentz::constant(eps, mu))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MaterialResponse::DrudeLorentz(m) => m.validate(),
            _ => Ok(()),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, MaterialResponse::DrudeLorentz(m) if m.is_vacuum())
    }

    /// Duality image: ε ↔ μ, which maps a perfect electric mirror to a
    /// perfect magnetic one.
    pub fn dual(&self) -> Self {
        match self {
            MaterialResponse::PerfectElectricMirror => MaterialResponse::PerfectMagneticMirror,
            MaterialResponse::PerfectMagneticMirror => MaterialResponse::PerfectElectricMirror,
            MaterialResponse::DrudeLorentz(m) => MaterialResponse::DrudeLorentz(m.dual()),
        }
    }

    /// Gain at real `omega`: `Im ε < 0` or `Im μ < 0`. Perfect mirrors are lossless.
    pub fn is_amplifying_at(&self, omega: f64) -> bool {
        match self {
            MaterialResponse::DrudeLorentz(m) => {
                let f = Frequency::Real(omega);
                m.permittivity(f).im < 0.0 || m.permeability(f).im < 0.0
            }
            _ => false,
        }
    }
}
