use serde::Serialize;

use super::domain::Domain;
use crate::error::{Error, Result};

/// Coordinates of a lattice point; unused trailing axes are zero.
pub type Coords = [f64; 3];

/// A regular lattice over an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    nodes: Vec<usize>,
    #[serde(skip)]
    spacing: Vec<f64>,
}

impl GridSpec {
    pub fn new(lo: &[f64], hi: &[f64], nodes: &[usize]) -> Result<Self> {
        let n = nodes.len();
        if !(1..=3).contains(&n) || lo.len() != n || hi.len() != n {
            return Err(Error::InvalidGrid(format!(
                "box and resolution must share a dimension in 1..=3 (got {}, {}, {})",
                lo.len(),
                hi.len(),
                n
            )));
        }
        if let Some(&bad) = nodes.iter().find(|&&k| k < 3) {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {bad}"
            )));
        }
        for i in 0..n {
            if !(lo[i].is_finite() && hi[i].is_finite() && hi[i] > lo[i]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {i}: empty extent [{}, {}]",
                    lo[i], hi[i]
                )));
            }
        }
        let spacing = (0..n)
            .map(|i| (hi[i] - lo[i]) / (nodes[i] - 1) as f64)
            .collect();
        Ok(GridSpec {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            nodes: nodes.to_vec(),
            spacing,
        })
    }

    /// Lattice on the tight bounding box of the domain's closure.
    pub fn tight(domain: &Domain, nodes: &[usize]) -> Result<Self> {
        let (lo, hi) = domain.bounding_box();
        Self::new(&lo, &hi, nodes)
    }

    /// Same node count on every axis of the domain's tight box.
    pub fn tight_uniform(domain: &Domain, nodes_per_axis: usize) -> Result<Self> {
        Self::tight(domain, &vec![nodes_per_axis; domain.dim()])
    }

    /// Whether the box contains the domain's closure.
    pub fn covers(&self, domain: &Domain) -> bool {
        let (lo, hi) = domain.bounding_box();
        lo.len() == self.dim()
            && (0..self.dim()).all(|i| {
                let slack = 1e-12 * (1.0 + self.hi[i].abs().max(self.lo[i].abs()));
                self.lo[i] <= lo[i] + slack && hi[i] <= self.hi[i] + slack
            })
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Length of a cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        self.spacing.iter().map(|h| h * h).sum::<f64>().sqrt()
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let mut mi = [0; 3];
        for (axis, &n) in self.nodes.iter().enumerate() {
            mi[axis] = idx % n;
            idx /= n;
        }
        mi
    }

    pub fn flat_index(&self, mi: &[usize]) -> usize {
        let mut idx = 0;
        for axis in (0..self.dim()).rev() {
            idx = idx * self.nodes[axis] + mi[axis];
        }
        idx
    }

    pub fn node_point(&self, idx: usize) -> Coords {
        let mi = self.multi_index(idx);
        let mut p = [0.0; 3];
        for axis in 0..self.dim() {
            p[axis] = self.coordinate(axis, mi[axis]);
        }
        p
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.nodes[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.spacing[axis]
        }
    }

    /// Number of cells along each axis.
    pub fn cells(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.cells().iter().product()
    }

    /// Flat index of the cell whose lower corner has multi-index `mi`.
    pub fn cell_index(&self, mi: &[usize]) -> usize {
        let mut idx = 0;
        for axis in (0..self.dim()).rev() {
            idx = idx * (self.nodes[axis] - 1) + mi[axis];
        }
        idx
    }

    /// Flat node indices of the `2^n` corners of the cell with lower corner
    /// `mi`. Corner `k` takes the upper node on axis `a` when bit `a` of `k` is set.
    pub fn cell_corners(&self, mi: &[usize]) -> ([usize; 8], usize) {
        let n = self.dim();
        let mut out = [0; 8];
        for (k, slot) in out.iter_mut().enumerate().take(1 << n) {
            let mut c = [0; 3];
            for axis in 0..n {
                c[axis] = mi[axis] + ((k >> axis) & 1);
            }
            *slot = self.flat_index(&c);
        }
        (out, 1 << n)
    }

    /// Lower-corner multi-index of the cell containing `x` and the local
    /// coordinates of `x` inside it (clamped to `[0, 1]`).
    pub fn locate(&self, x: &[f64]) -> ([usize; 3], [f64; 3]) {
        let mut mi = [0; 3];
        let mut s = [0.0; 3];
        for axis in 0..self.dim() {
            let t = (x[axis] - self.lo[axis]) / self.spacing[axis];
            let i = (t.floor().max(0.0) as usize).min(self.nodes[axis] - 2);
            mi[axis] = i;
            s[axis] = (t - i as f64).clamp(0.0, 1.0);
        }
        (mi, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_indexing() {
        let g = GridSpec::new(&[-1.0, 0.0], &[1.0, 2.0], &[5, 3]).unwrap();
        assert_eq!(g.spacing(), &[0.5, 1.0]);
        assert_eq!(g.len(), 15);
        for idx in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(idx)), idx);
        }
        assert_eq!(g.node_point(g.flat_index(&[4, 2])), [1.0, 2.0, 0.0]);
        let (mi, s) = g.locate(&[0.25, 1.5]);
        assert_eq!(&mi[..2], &[2, 1]);
        assert!((s[0] - 0.5).abs() < 1e-15 && (s[1] - 0.5).abs() < 1e-15);
        let (mi, s) = g.locate(&[1.0, 2.0]);
        assert_eq!(&mi[..2], &[3, 1]);
        assert_eq!(&s[..2], &[1.0, 1.0]);
    }

    #[test]
    fn rejects_coarse_or_empty_grids() {
        assert!(GridSpec::new(&[0.0], &[1.0], &[2]).is_err());
        assert!(GridSpec::new(&[0.0], &[0.0], &[5]).is_err());
        assert!(GridSpec::new(&[0.0, 0.0], &[1.0], &[5, 5]).is_err());
    }

    #[test]
    fn tight_box_covers_domain() {
        let d = Domain::ellipse([0.5, 0.0], [2.0, 1.0]).unwrap();
        let g = GridSpec::tight_uniform(&d, 9).unwrap();
        assert!(g.covers(&d));
        let small = GridSpec::new(&[0.0, 0.0], &[1.0, 1.0], &[9, 9]).unwrap();
        assert!(!small.covers(&d));
    }
}
