//! Closed-form domains, lattices over them, and node labeling.

mod domain;
mod grid;
mod lattice;
mod mask;

pub use domain::{Convexity, Domain, DomainKind};
pub use grid::{Coords, GridSpec};
pub use lattice::{Interpolation, Lattice, Stencil};
pub use mask::{build_mask, CellKind, NodeLabel, NodeMask, SNAP_FRACTION};

pub(crate) use domain::dist;
