//! Central-upwind edge fluxes, well-balanced source quadrature and the
//! semi-discrete right-hand side.

mod flux;
mod rhs;
mod source;

pub use flux::{edge_flux, flux_vectors, local_speeds, scalar_edge_flux, EdgeFlux, PointValue};
pub use rhs::{pure_depths, BoundaryKind, RhsWorkspace, Selection, SpatialOperator};
pub use source::{source_quadrature, SourceInput};
