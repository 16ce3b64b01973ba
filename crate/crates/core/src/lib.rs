//! Casimir-Polder potentials of excited magnetoelectric atoms near planar
//! reflectors, and the Casimir force on an optically dilute amplifying slab
//! built from such atoms.
//!
//! The crate is organised bottom-up:
//!
//! - [`quadrature`]: adaptive Gauss-Kronrod integration with error estimates.
//! - [`materials`]: atomic polarisability/magnetisability, their resonant
//!   delta weights, linearised Clausius-Mossotti, and reflector media.
//! - [`greens`]: coincident-point scattering Green-tensor traces for a
//!   single planar interface (closed-form mirrors and Sommerfeld integrals).
//! - [`potentials`]: nonresonant, resonant and total Casimir-Polder
//!   potentials and the duality transform.
//! - [`forces`]: the force on a dilute slab as the density-weighted sum of
//!   single-atom forces, with a closed form for the two-level/mirror case.
//! - [`cli`]: scenario files, sweeps, CSV emission and the plate-mirror
//!   reproduction experiment.
//!
//! All quantities are SI. The reduced-unit view lives in [`units`] and is
//! only used for output.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod error;
pub mod forces;
pub mod greens;
pub mod materials;
pub mod potentials;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
pub use forces::{ForceResult, SlabScenario};
pub use greens::{GreenTrace, PlanarGeometry};
pub use materials::{AtomModel, Frequency, MaterialResponse, Transition};
pub use potentials::PotentialResult;
