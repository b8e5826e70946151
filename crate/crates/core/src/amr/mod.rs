//! Residual-driven mesh adaptation: the weak local residual indicator,
//! refinement/coarsening flags and projection of cell averages onto the
//! adapted mesh.

mod project;
mod wlr;

pub use project::{project_state, OldMesh, ProjectionReport};
pub use wlr::{cell_indicator, weak_local_residual};

use crate::error::{Result, SwedError};
use crate::mesh::{MeshHierarchy, TriMesh};
use serde::{Deserialize, Serialize};

/// Adaptation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmrSettings {
    /// Finest refinement level above the base grid.
    pub max_level: u8,
    /// Refine where the indicator exceeds `sigma_tol` times its maximum.
    pub sigma_tol: f64,
    /// Coarsen where the indicator is below `coarsen_factor * sigma_tol * max`.
    pub coarsen_factor: f64,
    /// Indicator values at or below this are treated as zero, so that
    /// round-off on a steady state does not trigger refinement.
    pub indicator_floor: f64,
}

impl Default for AmrSettings {
    fn default() -> Self {
        AmrSettings { max_level: 1, sigma_tol: 0.01, coarsen_factor: 0.1, indicator_floor: 1e-9 }
    }
}

impl AmrSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_tol > 0.0 && self.sigma_tol.is_finite()) {
            return Err(SwedError::Config(format!("sigma_tol must be positive, got {}", self.sigma_tol)));
        }
        if !(self.coarsen_factor >= 0.0 && self.coarsen_factor < 1.0) {
            return Err(SwedError::Config(format!("coarsen_factor must lie in [0, 1), got {}", self.coarsen_factor)));
        }
        if !(self.indicator_floor >= 0.0 && self.indicator_floor.is_finite()) {
            return Err(SwedError::Config(format!("indicator_floor must be non-negative, got {}", self.indicator_floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Keep,
    Refine,
    Coarsen,
}

/// Flag cells from their indicator values.
pub fn flag_cells(indicator: &[f64], mesh: &TriMesh, s: &AmrSettings) -> Vec<Flag> {
    let emax = indicator.iter().cloned().fold(0.0, f64::max);
    let omega = (s.sigma_tol * emax).max(s.indicator_floor);
    indicator
        .iter()
        .enumerate()
        .map(|(j, &e)| {
            if e > omega && mesh.level[j] < s.max_level {
                Flag::Refine
            } else if e < s.coarsen_factor * omega && mesh.level[j] > 0 {
                Flag::Coarsen
            } else {
                Flag::Keep
            }
        })
        .collect()
}

/// Translate cell flags into leaves to refine and parents to coarsen. A
/// parent qualifies when all four children are leaves whose cells are all
/// flagged for coarsening.
pub fn flags_to_requests(mesh: &TriMesh, hier: &MeshHierarchy, flags: &[Flag]) -> (Vec<usize>, Vec<usize>) {
    let mut refine = Vec::new();
    let mut all_coarsen = vec![None::<bool>; hier.n_nodes()];
    for (j, f) in flags.iter().enumerate() {
        let leaf = mesh.origin[j].leaf;
        if *f == Flag::Refine && refine.last() != Some(&leaf) {
            refine.push(leaf);
        }
        let slot = &mut all_coarsen[leaf];
        *slot = Some(slot.unwrap_or(true) && *f == Flag::Coarsen);
    }
    refine.dedup();
    let mut parents: Vec<usize> = mesh.origin.iter().filter_map(|o| hier.parent(o.leaf)).collect();
    parents.sort_unstable();
    parents.dedup();
    let coarsen = parents
        .into_iter()
        .filter(|&p| hier.children(p).is_some_and(|ch| ch.iter().all(|&c| hier.is_leaf(c) && all_coarsen[c] == Some(true))))
        .collect();
    (refine, coarsen)
}
