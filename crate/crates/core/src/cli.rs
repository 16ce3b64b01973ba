//! Command-line front end: scenario files, sweeps and CSV output.
//!
//! Every CSV starts with `#` comment lines recording the scenario hash,
//! unit system, tolerances and sign convention, followed by a header row.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::constants::{ATOMIC_DIPOLE, C};
use crate::error::{Error, Result};
use crate::forces::{
    force_decomposition, plate_force_closed_form, SignConvention, SlabScenario,
    PLATE_FORCE_CONSTANT,
};
use crate::greens::{green_traces, PlanarGeometry};
use crate::materials::{AtomModel, Frequency, MaterialResponse};
use crate::potentials::{resonant_gradient, total_potential};
use crate::quadrature::QuadratureConfig;
use crate::units::ReducedUnits;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir-Polder potentials and dilute-slab forces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Green-tensor traces over a distance sweep.
    Greens(RunArgs),
    /// Casimir-Polder potential over a distance sweep.
    CpPotential(RunArgs),
    /// Force on a dilute slab over a gap sweep.
    PlateForce(RunArgs),
    /// Two-level slab above a perfect mirror in reduced units, with checks.
    Fig3(Fig3Args),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative quadrature tolerance, overriding the scenario.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Unit system of the output, overriding the scenario.
    #[arg(long, value_enum)]
    pub units: Option<UnitSystem>,
}

#[derive(Debug, Args)]
pub struct Fig3Args {
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of grid points in z̃.
    #[arg(long, default_value_t = FIG3_POINTS)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Si,
    Reduced,
}

impl UnitSystem {
    fn label(self) -> &'static str {
        match self {
            UnitSystem::Si => "si",
            UnitSystem::Reduced => "reduced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthUnit {
    /// Metres.
    #[default]
    M,
    /// `z̃ = 2ωz/c` with ω the largest atomic transition frequency.
    ZTilde,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default)]
    pub unit: LengthUnit,
}

impl Sweep {
    /// Distances in metres; `length` converts the sweep unit to metres.
    pub fn grid(&self, length: f64) -> Result<Vec<f64>> {
        let bad = |msg: String| Err(Error::Config(format!("sweep: {msg}")));
        if self.points == 0 {
            return bad("points must be at least 1".into());
        }
        if !(self.z_min > 0.0 && self.z_max.is_finite() && self.z_max >= self.z_min) {
            return bad(format!(
                "need 0 < z_min <= z_max, got {} and {}",
                self.z_min, self.z_max
            ));
        }
        let n = self.points;
        let at = |i: usize| -> f64 {
            if n == 1 {
                return self.z_min;
            }
            let t = i as f64 / (n - 1) as f64;
            match self.spacing {
                Spacing::Linear => self.z_min + t * (self.z_max - self.z_min),
                Spacing::Log => self.z_min * (self.z_max / self.z_min).powf(t),
            }
        };
        Ok((0..n).map(|i| at(i) * length).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabSpec {
    /// Thickness, in the sweep's length unit.
    pub d: f64,
    /// Number density, m⁻³.
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = QuadratureConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_evals: d.max_evals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    Both,
    Real,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreensOptions {
    /// Evaluation frequency, rad/s; defaults to the largest transition frequency.
    pub omega_rad_s: Option<f64>,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AtomSpec {
    /// Path to an atom TOML file, relative to the scenario file.
    File {
        file: PathBuf,
    },
    Inline(AtomModel),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub units: UnitSystem,
    pub atom: AtomSpec,
    pub reflector: MaterialResponse,
    pub sweep: Sweep,
    pub slab: Option<SlabSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub greens: GreensOptions,
    #[serde(default)]
    pub sign_convention: SignConvention,
}

/// A parsed scenario with its atom resolved and a hash of all input bytes.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub atom: AtomModel,
    pub sha256: String,
}

impl LoadedScenario {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&bytes, base)
    }

    /// Parses scenario text; a referenced atom file is resolved against `base`.
    pub fn parse(bytes: &[u8], base: &Path) -> Result<Self> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| Error::Config(format!("scenario is not UTF-8: {e}")))?;
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        if scenario.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                scenario.schema_version
            )));
        }
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        let atom = match &scenario.atom {
            AtomSpec::Inline(a) => {
                a.validate()
                    .map_err(|e| Error::Config(format!("atom: {e}")))?;
                a.clone()
            }
            AtomSpec::File { file } => {
                let path = base.join(file);
                let atom_bytes = fs::read(&path)
                    .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
                hasher.update(&atom_bytes);
                let text = std::str::from_utf8(&atom_bytes)
                    .map_err(|e| Error::Config(format!("atom file is not UTF-8: {e}")))?;
                AtomModel::from_toml_str(text)?
            }
        };
        scenario
            .reflector
            .validate()
            .map_err(|e| Error::Config(format!("reflector: {e}")))?;
        Ok(Self {
            scenario,
            atom,
            sha256: format!("{:x}", hasher.finalize()),
        })
    }

    pub fn quadrature(&self, tol: Option<f64>) -> Result<QuadratureConfig> {
        let t = &self.scenario.tolerances;
        let cfg = QuadratureConfig {
            rel_tol: tol.unwrap_or(t.rel_tol),
            abs_tol: t.abs_tol,
            max_evals: t.max_evals,
        };
        if !(cfg.rel_tol > 0.0 && cfg.rel_tol.is_finite() && cfg.abs_tol >= 0.0) {
            return Err(Error::Config(format!(
                "tolerances must be positive, got rel_tol = {}, abs_tol = {}",
                cfg.rel_tol, cfg.abs_tol
            )));
        }
        Ok(cfg)
    }

    /// Reference scales: largest transition frequency, largest dipole
    /// strength (magnetic strengths count as `|m|²/c²`), slab density.
    pub fn reduced_units(&self) -> Result<ReducedUnits> {
        let omega = self.atom.max_frequency();
        let dipole_sq = self
            .atom
            .transitions
            .iter()
            .map(|t| t.dipole_sq.max(t.magnetic_sq / (C * C)))
            .fold(0.0, f64::max);
        let eta = self.scenario.slab.as_ref().map_or(1.0, |s| s.eta);
        ReducedUnits::new(omega, dipole_sq, eta).map_err(|e| Error::Config(e.to_string()))
    }

    fn length_unit(&self) -> Result<f64> {
        Ok(match self.scenario.sweep.unit {
            LengthUnit::M => 1.0,
            LengthUnit::ZTilde => self.reduced_units()?.length(),
        })
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        self.scenario.sweep.grid(self.length_unit()?)
    }

    pub fn slab(&self) -> Result<SlabScenario> {
        let table = self
            .scenario
            .slab
            .as_ref()
            .ok_or_else(|| Error::Config("plate-force needs a [slab] table".into()))?;
        let d = table.d * self.length_unit()?;
        let first = self.grid()?[0];
        let s = SlabScenario::new(
            first,
            d,
            table.eta,
            self.atom.clone(),
            self.scenario.reflector.clone(),
        )
        .map_err(|e| Error::Config(format!("slab: {e}")))?;
        Ok(s.with_convention(self.scenario.sign_convention))
    }
}

/// Shortest round-trip representation, so output is reproducible bit for bit.
fn num(v: f64) -> String {
    format!("{v:e}")
}

struct Header<'a> {
    command: &'a str,
    sha256: &'a str,
    units: UnitSystem,
    config: &'a QuadratureConfig,
    extra: Vec<(String, String)>,
}

impl Header<'_> {
    fn write(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(
            out,
            "# casimir {} {}",
            self.command,
            env!("CARGO_PKG_VERSION")
        )?;
        writeln!(out, "# schema_version = {SCHEMA_VERSION}")?;
        writeln!(out, "# scenario_sha256 = {}", self.sha256)?;
        writeln!(out, "# units = {}", self.units.label())?;
        writeln!(
            out,
            "# rel_tol = {}, abs_tol = {}, max_evals = {}",
            num(self.config.rel_tol),
            num(self.config.abs_tol),
            self.config.max_evals
        )?;
        for (k, v) in &self.extra {
            writeln!(out, "# {k} = {v}")?;
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

fn write_rows(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Green-tensor traces along the sweep at real ω and/or at iξ with ξ = ω.
pub fn cmd_greens(
    loaded: &LoadedScenario,
    units: UnitSystem,
    config: &QuadratureConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let ru = loaded.reduced_units()?;
    let opts = loaded.scenario.greens;
    let omega = opts.omega_rad_s.unwrap_or(ru.omega);
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Config(format!(
            "greens.omega_rad_s must be positive, got {omega}"
        )));
    }
    let (le, lm, ll) = match units {
        UnitSystem::Si => (1.0, 1.0, 1.0),
        UnitSystem::Reduced => (ru.trace_e(), ru.trace_m(), ru.length()),
    };
    let grid = loaded.grid()?;
    let mut cols = vec!["z", "z_tilde"];
    let real = matches!(opts.axis, Axis::Both | Axis::Real);
    let imag = matches!(opts.axis, Axis::Both | Axis::Imaginary);
    if real {
        cols.extend([
            "re_trace_e",
            "im_trace_e",
            "re_trace_m",
            "im_trace_m",
            "error_e",
            "error_m",
        ]);
    }
    if imag {
        cols.extend(["trace_e_ixi", "trace_m_ixi", "error_e_ixi", "error_m_ixi"]);
    }
    let rows = grid
        .iter()
        .map(|&z| -> Result<Vec<String>> {
            let g = PlanarGeometry::new(loaded.scenario.reflector.clone(), z)?;
            let mut row = vec![num(z / ll), num(2.0 * omega * z / C)];
            if real {
                let t = green_traces(&g, Frequency::Real(omega), config)?;
                row.extend([
                    num(t.trace_e.re / le),
                    num(t.trace_e.im / le),
                    num(t.trace_m.re / lm),
                    num(t.trace_m.im / lm),
                    num(t.error_e / le),
                    num(t.error_m / lm),
                ]);
            }
            if imag {
                let t = green_traces(&g, Frequency::Imaginary(omega), config)?;
                row.extend([
                    num(t.trace_e.re / le),
                    num(t.trace_m.re / lm),
                    num(t.error_e / le),
                    num(t.error_m / lm),
                ]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Header {
        command: "greens",
        sha256: &loaded.sha256,
        units,
        config,
        extra: vec![("omega_rad_s".into(), num(omega))],
    }
    .write(out)?;
    write_rows(out, &cols, &rows)
}

pub fn cmd_cp_potential(
    loaded: &LoadedScenario,
    units: UnitSystem,
    config: &QuadratureConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let ru = loaded.reduced_units()?;
    let (le, ll) = match units {
        UnitSystem::Si => (1.0, 1.0),
        UnitSystem::Reduced => (ru.energy(), ru.length()),
    };
    let grid = loaded.grid()?;
    let rows = grid
        .iter()
        .map(|&z| -> Result<Vec<String>> {
            let g = PlanarGeometry::new(loaded.scenario.reflector.clone(), z)?;
            let u = total_potential(&loaded.atom, &g, config)?;
            Ok(vec![
                num(z / ll),
                num(ru.to_reduced_length(z)),
                num(u.u_nonresonant / le),
                num(u.u_resonant / le),
                num(u.u_total / le),
                num(u.quadrature_error / le),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Header {
        command: "cp-potential",
        sha256: &loaded.sha256,
        units,
        config,
        extra: vec![],
    }
    .write(out)?;
    write_rows(
        out,
        &[
            "z",
            "z_tilde",
            "u_nonresonant",
            "u_resonant",
            "u_total",
            "quadrature_error",
        ],
        &rows,
    )
}

pub fn cmd_plate_force(
    loaded: &LoadedScenario,
    units: UnitSystem,
    config: &QuadratureConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let ru = loaded.reduced_units()?;
    let slab = loaded.slab()?;
    let (lf, lp, ll) = match units {
        UnitSystem::Si => (1.0, 1.0, 1.0),
        UnitSystem::Reduced => (ru.force_per_area(), ru.force_per_volume(), ru.length()),
    };
    let grid = loaded.grid()?;
    let forces = force_decomposition(&slab, &grid, config)?;
    let closed = plate_force_closed_form(&slab).is_ok();
    let mut cols = vec![
        "z",
        "z_tilde",
        "f_resonant",
        "f_nonresonant",
        "f_total",
        "per_thickness",
        "quadrature_error",
    ];
    if closed {
        cols.push("f_resonant_closed_form");
    }
    let rows = forces
        .iter()
        .map(|f| -> Result<Vec<String>> {
            let mut row = vec![
                num(f.z / ll),
                num(ru.to_reduced_length(f.z)),
                num(f.f_resonant / lf),
                num(f.f_nonresonant / lf),
                num(f.f_total / lf),
                num(f.per_thickness / lp),
                num(f.quadrature_error / lf),
            ];
            if closed {
                row.push(num(plate_force_closed_form(&slab.at_gap(f.z)?)?.force / lf));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut extra = vec![
        ("sign_convention".into(), slab.convention.label().into()),
        ("slab_thickness_m".into(), num(slab.d)),
        ("eta_m3".into(), num(slab.eta)),
    ];
    if closed {
        extra.push(("plate_force_constant".into(), num(PLATE_FORCE_CONSTANT)));
    }
    Header {
        command: "plate-force",
        sha256: &loaded.sha256,
        units,
        config,
        extra,
    }
    .write(out)?;
    write_rows(out, &cols, &rows)
}

pub const FIG3_POINTS: usize = 3000;
/// Slab thicknesses `d̃ = 2ω₁₀d/c`, i.e. `d = 0.1, 1, 5` in units of `c/ω₁₀`.
pub const FIG3_THICKNESSES: [f64; 3] = [0.2, 2.0, 10.0];
pub const FIG3_RANGE: (f64, f64) = (0.05, 30.0);
const FIG3_OMEGA: f64 = 2.4e15;
const FIG3_ETA: f64 = 1e20;
const FIG3_DIPOLE: f64 = 3.0 * ATOMIC_DIPOLE;

/// Outcome of the plate-mirror experiment for one thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Curve {
    pub d_tilde: f64,
    /// Sign changes on `5 ≤ z̃ ≤ 30`.
    pub sign_changes: usize,
    /// Spacing between the two outermost zeros, in z̃.
    pub last_zero_spacing: f64,
    /// Largest |reduced per-thickness force| over the last period before z̃ = 30.
    pub tail_amplitude: f64,
    /// Attractive at every grid point with z̃ < 0.5.
    pub attractive_short_range: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Summary {
    pub curves: Vec<Fig3Curve>,
    pub atom_attractive_short_range: bool,
}

impl Fig3Summary {
    pub fn short_range_ok(&self) -> bool {
        self.atom_attractive_short_range && self.curves.iter().all(|c| c.attractive_short_range)
    }

    pub fn oscillation_ok(&self) -> bool {
        self.curves.iter().all(|c| {
            c.sign_changes >= 6 && (c.last_zero_spacing / std::f64::consts::PI - 1.0).abs() <= 0.05
        })
    }

    pub fn amplitude_ok(&self) -> bool {
        self.curves
            .windows(2)
            .all(|w| w[1].tail_amplitude < w[0].tail_amplitude)
    }

    pub fn passed(&self) -> bool {
        self.short_range_ok() && self.oscillation_ok() && self.amplitude_ok()
    }

    pub fn render(&self) -> String {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut s = String::new();
        for c in &self.curves {
            s.push_str(&format!(
                "d_tilde = {}: {} for z_tilde < 0.5, {} sign changes on [5, 30], last zero spacing {:.4} (pi = {:.4}), tail amplitude {:.6e}\n",
                c.d_tilde,
                if c.attractive_short_range { "attractive" } else { "NOT attractive" },
                c.sign_changes,
                c.last_zero_spacing,
                std::f64::consts::PI,
                c.tail_amplitude
            ));
        }
        s.push_str(&format!(
            "single atom: {} for z_tilde < 0.5\n",
            if self.atom_attractive_short_range {
                "attractive"
            } else {
                "NOT attractive"
            }
        ));
        s.push_str(&format!(
            "(a) short-range attraction: {}\n",
            verdict(self.short_range_ok())
        ));
        s.push_str(&format!(
            "(b) retarded oscillation: {}\n",
            verdict(self.oscillation_ok())
        ));
        s.push_str(&format!(
            "(c) amplitude decreases with thickness: {}\n",
            verdict(self.amplitude_ok())
        ));
        s
    }
}

/// The built-in two-level slab above a perfect electric mirror.
pub fn fig3_slab(d_tilde: f64, z_tilde: f64) -> Result<SlabScenario> {
    let len = C / (2.0 * FIG3_OMEGA);
    SlabScenario::new(
        z_tilde * len,
        d_tilde * len,
        FIG3_ETA,
        AtomModel::two_level_excited(FIG3_OMEGA, FIG3_DIPOLE * FIG3_DIPOLE)?,
        MaterialResponse::PerfectElectricMirror,
    )
}

fn fig3_units() -> Result<ReducedUnits> {
    ReducedUnits::new(FIG3_OMEGA, FIG3_DIPOLE * FIG3_DIPOLE, FIG3_ETA)
}

/// Reduced per-thickness slab force at `z̃`.
pub fn fig3_per_thickness(d_tilde: f64, z_tilde: f64) -> Result<f64> {
    let s = fig3_slab(d_tilde, z_tilde)?;
    let f = plate_force_closed_form(&s)?.force;
    Ok(fig3_units()?.to_reduced_per_thickness(f / s.d))
}

/// Reduced single-atom resonant force times η, the thin-slab limit.
pub fn fig3_atom_force(z_tilde: f64, config: &QuadratureConfig) -> Result<f64> {
    let s = fig3_slab(1.0, z_tilde)?;
    let g = PlanarGeometry::new(s.reflector.clone(), s.z)?;
    let grad = resonant_gradient(&s.atom, &g, config)?.value;
    Ok(fig3_units()?.to_reduced_per_thickness(s.convention.factor() * s.eta * grad))
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = f(a)?;
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn fig3_curve(d_tilde: f64, grid: &[f64], values: &[f64]) -> Result<Fig3Curve> {
    let attractive_short_range = grid
        .iter()
        .zip(values)
        .filter(|(z, _)| **z < 0.5)
        .all(|(_, v)| *v < 0.0);
    let mut zeros = Vec::new();
    for i in 1..grid.len() {
        if grid[i - 1] < 5.0 || grid[i] > 30.0 {
            continue;
        }
        if (values[i - 1] < 0.0) != (values[i] < 0.0) {
            zeros.push(bisect(
                |z| fig3_per_thickness(d_tilde, z),
                grid[i - 1],
                grid[i],
            )?);
        }
    }
    let last_zero_spacing = match zeros.len() {
        0 | 1 => f64::NAN,
        n => zeros[n - 1] - zeros[n - 2],
    };
    let tail_start = FIG3_RANGE.1 - 2.0 * std::f64::consts::PI;
    let tail_amplitude = grid
        .iter()
        .zip(values)
        .filter(|(z, _)| **z >= tail_start)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    Ok(Fig3Curve {
        d_tilde,
        sign_changes: zeros.len(),
        last_zero_spacing,
        tail_amplitude,
        attractive_short_range,
    })
}

/// Reduced per-thickness force for `d̃ ∈ {0.2, 2, 10}` and the single-atom
/// force on a linear z̃ grid; writes the CSV and returns the checks.
pub fn run_fig3(
    points: usize,
    config: &QuadratureConfig,
    out: &mut dyn Write,
) -> Result<Fig3Summary> {
    if points < 2 {
        return Err(Error::Config("fig3 needs at least two grid points".into()));
    }
    let (lo, hi) = FIG3_RANGE;
    let grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let columns = FIG3_THICKNESSES
        .iter()
        .map(|&d| {
            grid.iter()
                .map(|&z| fig3_per_thickness(d, z))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let atom = grid
        .iter()
        .map(|&z| fig3_atom_force(z, config))
        .collect::<Result<Vec<_>>>()?;
    let curves = FIG3_THICKNESSES
        .iter()
        .zip(&columns)
        .map(|(&d, v)| fig3_curve(d, &grid, v))
        .collect::<Result<Vec<_>>>()?;
    let summary = Fig3Summary {
        curves,
        atom_attractive_short_range: grid
            .iter()
            .zip(&atom)
            .filter(|(z, _)| **z < 0.5)
            .all(|(_, v)| *v < 0.0),
    };

    let description = format!(
        "fig3 omega={} dipole_sq={} eta={} d_tilde={:?} range={:?} points={points}",
        num(FIG3_OMEGA),
        num(FIG3_DIPOLE * FIG3_DIPOLE),
        num(FIG3_ETA),
        FIG3_THICKNESSES,
        FIG3_RANGE
    );
    let sha = format!("{:x}", Sha256::digest(description.as_bytes()));
    Header {
        command: "fig3",
        sha256: &sha,
        units: UnitSystem::Reduced,
        config,
        extra: vec![
            (
                "sign_convention".into(),
                SignConvention::MinusGradient.label().into(),
            ),
            ("plate_force_constant".into(), num(PLATE_FORCE_CONSTANT)),
            ("omega_10_rad_s".into(), num(FIG3_OMEGA)),
            ("eta_m3".into(), num(FIG3_ETA)),
        ],
    }
    .write(out)?;
    let mut cols = vec!["z_tilde".to_string()];
    cols.extend(
        FIG3_THICKNESSES
            .iter()
            .map(|d| format!("per_thickness_d{d}")),
    );
    cols.push("atom_force".into());
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let mut r = vec![num(grid[i])];
            r.extend(columns.iter().map(|c| num(c[i])));
            r.push(num(atom[i]));
            r
        })
        .collect();
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    write_rows(out, &col_refs, &rows)?;
    Ok(summary)
}

/// Process exit code: 2 for bad input, 3 for numerical or check failures.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() || matches!(err, Error::CheckFailed(_)) {
        3
    } else {
        2
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Greens(a) => run_scenario(a, cmd_greens),
        Command::CpPotential(a) => run_scenario(a, cmd_cp_potential),
        Command::PlateForce(a) => run_scenario(a, cmd_plate_force),
        Command::Fig3(a) => {
            let config = match a.tol {
                Some(t) => QuadratureConfig::with_rel_tol(t),
                None => QuadratureConfig::default(),
            };
            let mut out = open_output(&a.out)?;
            let summary = run_fig3(a.points, &config, &mut out)?;
            out.flush()?;
            let report = summary.render();
            match &a.out {
                Some(p) => {
                    fs::write(p.with_extension("summary.txt"), &report)?;
                    print!("{report}");
                }
                None => eprint!("{report}"),
            }
            if summary.passed() {
                Ok(())
            } else {
                Err(Error::CheckFailed(
                    "plate-mirror checks did not all hold".into(),
                ))
            }
        }
    }
}

type CommandFn = fn(&LoadedScenario, UnitSystem, &QuadratureConfig, &mut dyn Write) -> Result<()>;

fn run_scenario(a: RunArgs, f: CommandFn) -> Result<()> {
    let loaded = LoadedScenario::load(&a.scenario)?;
    let config = loaded.quadrature(a.tol)?;
    let units = a.units.unwrap_or(loaded.scenario.units);
    // Compute into memory so a failed run leaves no partial file.
    let mut buf = Vec::new();
    f(&loaded, units, &config, &mut buf)?;
    let mut out = open_output(&a.out)?;
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = r#"
schema_version = 1
units = "si"

[atom]
state_label = "excited"
[[atom.transitions]]
omega_nk_rad_s = 2.0e15
dipole_sq_C2m2 = 7.0e-59

[reflector]
model = "perfect-electric-mirror"

[sweep]
z_min = 0.5
z_max = 20.0
points = 5
spacing = "log"
unit = "z-tilde"

[slab]
d = 2.0
eta = 1.0e20
"#;

    fn loaded(text: &str) -> Result<LoadedScenario> {
        LoadedScenario::parse(text.as_bytes(), Path::new("."))
    }

    #[test]
    fn parses_inline_scenario() {
        let l = loaded(SCENARIO).unwrap();
        let g = l.grid().unwrap();
        assert_eq!(g.len(), 5);
        let ru = l.reduced_units().unwrap();
        assert!((ru.to_reduced_length(g[4]) - 20.0).abs() < 1e-12);
        assert_eq!(l.sha256.len(), 64);
    }

    #[test]
    fn rejects_bad_schema() {
        let bad = SCENARIO.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(loaded(&bad), Err(Error::Config(_))));
        let bad = SCENARIO.replace("points = 5", "points = 0");
        assert!(matches!(
            loaded(&bad).unwrap().grid(),
            Err(Error::Config(_))
        ));
        let bad = SCENARIO.replace("[slab]", "[slab]\ncolour = 1");
        assert!(matches!(loaded(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(
            exit_code(&Error::NotConverged {
                value: 0.0,
                abs_error_estimate: 1.0,
                evaluations: 1
            }),
            3
        );
        assert_eq!(exit_code(&Error::CheckFailed("x".into())), 3);
    }

    #[test]
    fn output_is_deterministic() {
        let l = loaded(SCENARIO).unwrap();
        let cfg = l.quadrature(None).unwrap();
        let run = || {
            let mut buf = Vec::new();
            cmd_plate_force(&l, UnitSystem::Reduced, &cfg, &mut buf).unwrap();
            buf
        };
        let a = run();
        assert_eq!(a, run());
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains(&format!("# scenario_sha256 = {}", l.sha256)));
        assert!(text.contains("# plate_force_constant = "));
        assert!(text.contains("f_resonant_closed_form"));
    }
}
