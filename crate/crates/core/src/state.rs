//! Cell-average unknowns and physical constants.

use crate::error::{Result, SwedError};
use serde::{Deserialize, Serialize};

/// Number of evolved quantities per cell.
pub const NVAR: usize = 6;
pub const W: usize = 0;
pub const HU: usize = 1;
pub const HV: usize = 2;
pub const HR: usize = 3;
/// Level-set function.
pub const PHI: usize = 4;
/// Volume fraction of fluid 1.
pub const FRAC: usize = 5;

/// Per-cell unknowns: `(w, hu, hv, h*rho, phi, f)`.
pub type Vars = [f64; NVAR];

/// Conserved flow variables at a point or as a cell average.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub w: f64,
    pub hu: f64,
    pub hv: f64,
    pub hrho: f64,
}

impl Conserved {
    pub fn new(w: f64, hu: f64, hv: f64, hrho: f64) -> Self {
        Conserved { w, hu, hv, hrho }
    }

    pub fn from_vars(v: &Vars) -> Self {
        Conserved { w: v[W], hu: v[HU], hv: v[HV], hrho: v[HR] }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.hu, self.hv, self.hrho]
    }
}

/// Cell averages of all evolved quantities on the active mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct State {
    pub u: Vec<Vars>,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State { u: vec![[0.0; NVAR]; n] }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn conserved(&self, j: usize) -> Conserved {
        Conserved::from_vars(&self.u[j])
    }
}

/// Physical and numerical constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    /// Gravitational acceleration.
    pub g: f64,
    /// Reference density.
    pub rho0: f64,
    /// Threshold below which the sum of one-sided speeds counts as zero.
    pub sigma: f64,
    /// Relative density floor on nearly dry cells.
    pub eps: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams { g: 1.0, rho0: 997.0, sigma: 1e-6, eps: 1e-4 }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.g) || !ok(self.rho0) || !ok(self.sigma) || !ok(self.eps) {
            return Err(SwedError::Config(format!("g, rho0, sigma and eps must be positive and finite, got {self:?}")));
        }
        Ok(())
    }

    /// `g / (2 rho0)`, the coefficient of `rho h^2` in the pressure term.
    #[inline]
    pub fn half_g_over_rho0(&self) -> f64 {
        0.5 * self.g / self.rho0
    }
}
