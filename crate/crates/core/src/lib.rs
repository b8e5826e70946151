//! Adaptive central-upwind finite-volume solver for shallow water with
//! variable density on unstructured triangular grids.
//!
//! The state per cell is `(w, hu, hv, h rho)` plus a level set `phi` and a
//! fluid-1 volume fraction that locate a density jump between two fluids.
//! [`solver::Simulation`] advances it with local time stepping and optional
//! residual-driven refinement; [`scenario::ScenarioConfig`] builds the
//! built-in test cases and [`driver`] runs them, measures errors and writes
//! snapshots.

pub mod error;
pub mod geometry;
pub mod state;
pub mod mesh;
pub mod reconstruction;
pub mod riemann;
pub mod cu;
pub mod interface;
pub mod amr;
pub mod time;
pub mod solver;
pub mod scenario;
pub mod output;
pub mod driver;

pub use error::{Result, SwedError};
