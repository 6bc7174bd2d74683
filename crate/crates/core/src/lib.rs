//! Thermal charging of a spin-chain quantum battery coupled to a driven,
//! lossy single-mode cavity.
//!
//! The crate builds the battery/cavity operators ([`model`]), the thermal
//! cavity bath ([`bath`]), integrates the master equation with fixed-step
//! RK4 ([`dynamics`]) and evaluates stored energy, net charging energy and
//! ergotropy of the reduced battery state ([`energetics`]). [`sweep`] runs
//! parameter sweeps and writes CSV, manifest and SVG artifacts.

pub mod bath;
pub mod dynamics;
pub mod energetics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod par;
pub mod sweep;

pub use dynamics::{evolve, evolve_with, DensityMatrix, Diagnostics, EvolveOptions, Trajectory};
pub use energetics::{ergotropy, passive_state, EnergyReport};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HilbertFactorization};
pub use model::{Channels, InitialBattery, ModelOperators, SystemSpec};
pub use par::Execution;
