//! Deterministic Vlasov-Maxwell-Landau kinetics at desk scale.
//!
//! The crate evaluates the steady-state system
//!
//!   v . grad_x f + (E + v x B) . grad_v f = nu Q(f,f)
//!   curl B = J,   div E = rho - rho_ion,   div B = 0
//!
//! on the unit torus times a truncated velocity box, with the Coulomb-kernel
//! Landau collision operator, and audits candidate steady states with a
//! seven-step equilibrium characterization pipeline (H-theorem, nullspace
//! fit, temperature uniformity, Killing equation, torus Killing fields,
//! Ampere/Gauss closure, harmonic B).
//!
//! Everything is deterministic: reductions run in fixed index order, so
//! results are bit-identical regardless of thread count.

pub mod error;
pub mod fields;
pub mod fixtures;
pub mod grid;
pub mod landau;
pub mod maxwell;
pub mod relax;
pub mod rng;
pub mod verify;
pub mod vlasov;
mod spectral;

pub use error::{Result, VmlkError};
