use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::grid::{Coords, GridSpec};
use crate::error::{Error, Result};

/// Nodes closer to the boundary than this fraction of the smallest spacing
/// are snapped onto it instead of being treated as interior.
pub const SNAP_FRACTION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeLabel {
    Interior,
    Boundary,
    Exterior,
}

/// How the corners of a lattice cell are labeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    /// Every corner is interior.
    Regular,
    /// No exterior corner, at least one boundary corner.
    Cut,
    /// Mixes exterior corners with interior or boundary ones.
    Partial,
    /// Every corner is exterior.
    Outside,
}

/// Interior / boundary / exterior labels for every lattice node.
///
/// Interior nodes sit strictly inside the domain. Boundary nodes are the
/// non-interior corners of every cell that reaches the closed domain; each
/// carries an anchor, its projection onto the boundary, where boundary data
/// is sampled. Everything else is exterior.
#[derive(Debug, Clone)]
pub struct NodeMask {
    labels: Vec<NodeLabel>,
    anchors: Vec<Coords>,
    signed_distance: Vec<f64>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    cells: Vec<CellKind>,
    snap_tolerance: f64,
}

impl NodeMask {
    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> NodeLabel {
        self.labels[idx]
    }

    /// Where the node's value lives: the node itself when interior, its
    /// boundary projection when a boundary node, NaN when exterior.
    pub fn anchor(&self, idx: usize) -> Coords {
        self.anchors[idx]
    }

    /// Signed distance of the lattice node (not of its anchor).
    pub fn signed_distance(&self, idx: usize) -> f64 {
        self.signed_distance[idx]
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn cell_kind(&self, cell: usize) -> CellKind {
        self.cells[cell]
    }

    pub fn snap_tolerance(&self) -> f64 {
        self.snap_tolerance
    }

    /// Builds a mask from explicit labels, anchoring boundary nodes at their
    /// lattice position. Meant for tests and hand-made discretizations.
    pub fn from_labels(grid: &GridSpec, labels: Vec<NodeLabel>) -> Result<Self> {
        if labels.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} labels for {} nodes",
                labels.len(),
                grid.len()
            )));
        }
        let anchors = (0..grid.len())
            .map(|i| match labels[i] {
                NodeLabel::Exterior => [f64::NAN; 3],
                _ => grid.node_point(i),
            })
            .collect();
        Self::assemble(grid, labels, anchors, vec![f64::NAN; grid.len()], 0.0)
    }

    fn assemble(
        grid: &GridSpec,
        labels: Vec<NodeLabel>,
        anchors: Vec<Coords>,
        signed_distance: Vec<f64>,
        snap_tolerance: f64,
    ) -> Result<Self> {
        let interior: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == NodeLabel::Interior)
            .collect();
        if interior.is_empty() {
            return Err(Error::NoInteriorNode);
        }
        let boundary = (0..labels.len())
            .filter(|&i| labels[i] == NodeLabel::Boundary)
            .collect();
        let cells = cell_kinds(grid, &labels);
        Ok(NodeMask {
            labels,
            anchors,
            signed_distance,
            interior,
            boundary,
            cells,
            snap_tolerance,
        })
    }
}

fn for_each_cell(grid: &GridSpec, mut f: impl FnMut(usize, [usize; 3])) {
    let cells = grid.cells();
    let total: usize = cells.iter().product();
    for c in 0..total {
        let mut rem = c;
        let mut mi = [0; 3];
        for (axis, &n) in cells.iter().enumerate() {
            mi[axis] = rem % n;
            rem /= n;
        }
        f(c, mi);
    }
}

fn cell_kinds(grid: &GridSpec, labels: &[NodeLabel]) -> Vec<CellKind> {
    let mut kinds = vec![CellKind::Outside; grid.cell_count()];
    for_each_cell(grid, |c, mi| {
        let (corners, k) = grid.cell_corners(&mi);
        let (mut interior, mut boundary, mut exterior) = (0, 0, 0);
        for &node in &corners[..k] {
            match labels[node] {
                NodeLabel::Interior => interior += 1,
                NodeLabel::Boundary => boundary += 1,
                NodeLabel::Exterior => exterior += 1,
            }
        }
        kinds[c] = if exterior == k {
            CellKind::Outside
        } else if exterior > 0 {
            CellKind::Partial
        } else if boundary > 0 {
            CellKind::Cut
        } else {
            debug_assert_eq!(interior, k);
            CellKind::Regular
        };
    });
    kinds
}

/// Labels the lattice nodes of `grid` against `domain`.
///
/// Deterministic; fails when the grid resolves no interior node.
pub fn build_mask(domain: &Domain, grid: &GridSpec) -> Result<NodeMask> {
    if domain.dim() != grid.dim() {
        return Err(Error::InvalidGrid(format!(
            "grid dimension {} does not match domain dimension {}",
            grid.dim(),
            domain.dim()
        )));
    }
    if !grid.covers(domain) {
        return Err(Error::InvalidGrid(
            "grid box does not contain the closed domain".into(),
        ));
    }
    let n = grid.dim();
    let sd: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| domain.signed_distance(&grid.node_point(i)[..n]))
        .collect();
    let snap = SNAP_FRACTION * grid.min_spacing();
    let mut labels: Vec<NodeLabel> = sd
        .iter()
        .map(|&d| {
            if d > snap {
                NodeLabel::Interior
            } else {
                NodeLabel::Exterior
            }
        })
        .collect();

    // A cell reaches the closed domain only if its center is within half a
    // diagonal of it (signed distance is 1-Lipschitz).
    let reach = 0.5 * grid.cell_diagonal() + 1e-6 * grid.min_spacing();
    let mut cell_centers = Vec::with_capacity(grid.cell_count());
    for_each_cell(grid, |_, mi| {
        let mut p = [0.0; 3];
        for axis in 0..n {
            p[axis] = grid.coordinate(axis, mi[axis]) + 0.5 * grid.spacing()[axis];
        }
        cell_centers.push((mi, p));
    });
    let meets: Vec<bool> = cell_centers
        .par_iter()
        .map(|(_, p)| domain.signed_distance(&p[..n]) >= -reach)
        .collect();
    for ((mi, _), meets) in cell_centers.iter().zip(meets) {
        if !meets {
            continue;
        }
        let (corners, k) = grid.cell_corners(mi);
        for &node in &corners[..k] {
            if labels[node] == NodeLabel::Exterior {
                labels[node] = NodeLabel::Boundary;
            }
        }
    }

    let anchors = (0..grid.len())
        .map(|i| match labels[i] {
            NodeLabel::Interior => grid.node_point(i),
            NodeLabel::Boundary => {
                let proj = domain.project_to_boundary(&grid.node_point(i)[..n]);
                let mut p = [0.0; 3];
                p[..n].copy_from_slice(&proj);
                p
            }
            NodeLabel::Exterior => [f64::NAN; 3],
        })
        .collect();
    NodeMask::assemble(grid, labels, anchors, sd, snap)
}
