//! Finite-volume solvers for non-local LWR traffic models on a ring road.
//!
//! The density obeys `rho_t + (g(rho) V(t, x))_x = 0`, where the velocity is
//! a downstream average of `v(rho)` (mean-velocity variant) or `v` of a
//! downstream average of `rho` (mean-density variant), weighted by a kernel
//! supported on `[0, eta]`.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod kernel;
pub mod model;
pub mod plot;
pub mod poly;
pub mod report;
pub mod scheme;

pub use error::{Error, Result};
pub use grid::{project_initial, Grid1D, GridState, InitialData};
pub use kernel::{quadrature_weights, DiscreteKernel, KernelFamily, KernelSpec};
pub use model::{FluxGFn, ModelSpec, ModelVariant, VelocityFn};
pub use scheme::{run, RunOptions, SchemeConfig, SchemeKind, Simulation};
