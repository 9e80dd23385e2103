use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::grid::GridSpec;
use super::mask::{build_mask, CellKind, NodeLabel, NodeMask};
use crate::error::Result;

/// How cells touching the boundary are interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Boundary corners sit at their anchors on the boundary; the cell is
    /// interpolated multilinearly in its deformed coordinates.
    #[default]
    Snapped,
    /// Every corner sits at its lattice position.
    Lattice,
}

/// Convex interpolation weights over at most `2^n` nodes.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub nodes: [usize; 8],
    pub weights: [f64; 8],
    pub len: usize,
}

impl Stencil {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes[..self.len]
            .iter()
            .copied()
            .zip(self.weights[..self.len].iter().copied())
    }
}

/// A domain discretized on a lattice: the shared backbone of every field.
#[derive(Debug, Clone)]
pub struct Lattice {
    domain: Domain,
    grid: GridSpec,
    mask: NodeMask,
    interpolation: Interpolation,
}

impl Lattice {
    pub fn new(domain: Domain, grid: GridSpec) -> Result<Self> {
        let mask = build_mask(&domain, &grid)?;
        Ok(Lattice {
            domain,
            grid,
            mask,
            interpolation: Interpolation::default(),
        })
    }

    pub fn with_mask(domain: Domain, grid: GridSpec, mask: NodeMask) -> Self {
        Lattice {
            domain,
            grid,
            mask,
            interpolation: Interpolation::default(),
        }
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mask(&self) -> &NodeMask {
        &self.mask
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Interpolation weights for `x`: nonnegative, summing to one, and
    /// supported on non-exterior nodes only. `None` when every corner of the
    /// containing cell is exterior.
    pub fn weights(&self, x: &[f64]) -> Option<Stencil> {
        let n = self.dim();
        let (mi, s) = self.grid.locate(x);
        let kind = self.mask.cell_kind(self.grid.cell_index(&mi[..n]));
        match (kind, self.interpolation) {
            (CellKind::Outside, _) => None,
            (CellKind::Regular, _) | (_, Interpolation::Lattice) => {
                Some(self.lattice_weights(&mi, s, kind))
            }
            _ => Some(self.snapped_weights(x, &mi, s, kind)),
        }
    }

    fn lattice_weights(&self, mi: &[usize; 3], s: [f64; 3], kind: CellKind) -> Stencil {
        let n = self.dim();
        let (corners, k) = self.grid.cell_corners(&mi[..n]);
        let mut out = Stencil {
            nodes: corners,
            weights: [0.0; 8],
            len: k,
        };
        multilinear(n, &s, &mut out.weights);
        if kind == CellKind::Partial {
            let mut kept = 0.0;
            for c in 0..k {
                if self.mask.label(corners[c]) == NodeLabel::Exterior {
                    out.weights[c] = 0.0;
                } else {
                    kept += out.weights[c];
                }
            }
            if kept > 0.0 {
                for w in &mut out.weights[..k] {
                    *w /= kept;
                }
            } else {
                // The point sits on the exterior face of the cell: share
                // evenly among the admissible corners.
                let admissible = corners[..k]
                    .iter()
                    .filter(|&&c| self.mask.label(c) != NodeLabel::Exterior)
                    .count() as f64;
                for c in 0..k {
                    if self.mask.label(corners[c]) != NodeLabel::Exterior {
                        out.weights[c] = 1.0 / admissible;
                    }
                }
            }
        }
        debug_assert!(out.weights[..k].iter().all(|w| *w >= 0.0));
        debug_assert!((out.weights[..k].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        out
    }

    /// Weights from the cut cells whose boundary corners have been moved to
    /// their anchors. The deformed cells no longer line up with the lattice,
    /// so the containing cell and its cut neighbours are all tried; the one
    /// whose image lies closest to `x` wins.
    fn snapped_weights(&self, x: &[f64], mi: &[usize; 3], s: [f64; 3], kind: CellKind) -> Stencil {
        let n = self.dim();
        let scale = self.grid.min_spacing();
        let mut best: Option<(f64, Stencil)> = None;
        // Offsets of the 3^n neighbouring cells, the containing cell first.
        let centre = (3usize.pow(n as u32) - 1) / 2;
        let order =
            std::iter::once(centre).chain((0..3usize.pow(n as u32)).filter(|&c| c != centre));
        for code in order {
            let mut offsets = [0i64; 3];
            let mut rem = code;
            for o in offsets.iter_mut().take(n) {
                *o = (rem % 3) as i64 - 1;
                rem /= 3;
            }
            let mut cell = [0usize; 3];
            let mut valid = true;
            for a in 0..n {
                let c = mi[a] as i64 + offsets[a];
                if c < 0 || c >= self.grid.nodes()[a] as i64 - 1 {
                    valid = false;
                    break;
                }
                cell[a] = c as usize;
            }
            if !valid || self.mask.cell_kind(self.grid.cell_index(&cell[..n])) != CellKind::Cut {
                continue;
            }
            let (corners, k) = self.grid.cell_corners(&cell[..n]);
            let start = if code == centre { s } else { [0.5; 3] };
            let (local, miss) = self.snapped_coordinates(x, &corners[..k], start);
            if best.as_ref().is_none_or(|(m, _)| miss < *m) {
                let mut st = Stencil {
                    nodes: corners,
                    weights: [0.0; 8],
                    len: k,
                };
                multilinear(n, &local, &mut st.weights);
                best = Some((miss, st));
            }
            if miss <= 1e-12 * scale {
                break;
            }
        }
        match best {
            // A partial cell only defers to a deformed neighbour that
            // actually contains the point.
            Some((miss, st)) if kind == CellKind::Cut || miss <= 1e-9 * scale => st,
            _ => self.lattice_weights(mi, s, kind),
        }
    }

    /// Local coordinates of `x` in a deformed cell, found by Newton on the
    /// multilinear map and clamped to the unit cube, together with the
    /// distance from `x` to the image of the clamped coordinates.
    fn snapped_coordinates(
        &self,
        x: &[f64],
        corners: &[usize],
        start: [f64; 3],
    ) -> ([f64; 3], f64) {
        let n = self.dim();
        let positions: Vec<[f64; 3]> = corners.iter().map(|&c| self.mask.anchor(c)).collect();
        let image = |s: &[f64; 3]| {
            let mut w = [0.0; 8];
            multilinear(n, s, &mut w);
            let mut p = [0.0; 3];
            for (q, wk) in positions.iter().zip(&w) {
                for axis in 0..n {
                    p[axis] += wk * q[axis];
                }
            }
            p
        };
        let scale = self.grid.min_spacing();
        let mut s = start;
        for _ in 0..30 {
            let p = image(&s);
            let mut residual = [0.0; 3];
            for axis in 0..n {
                residual[axis] = x[axis] - p[axis];
            }
            if residual[..n].iter().map(|r| r * r).sum::<f64>().sqrt() <= 1e-14 * scale {
                break;
            }
            let jac = multilinear_jacobian(n, &s, &positions);
            let Some(step) = solve_small(n, jac, residual) else {
                break;
            };
            for axis in 0..n {
                s[axis] += step[axis];
            }
            if s[..n]
                .iter()
                .any(|v| !v.is_finite() || *v < -1.0 || *v > 2.0)
            {
                s = start;
                break;
            }
        }
        for v in &mut s[..n] {
            *v = v.clamp(0.0, 1.0);
        }
        let p = image(&s);
        let miss = (0..n).map(|a| (p[a] - x[a]).powi(2)).sum::<f64>().sqrt();
        (s, miss)
    }
}

/// Multilinear weights of the `2^n` cell corners at local coordinates `s`.
fn multilinear(n: usize, s: &[f64; 3], out: &mut [f64; 8]) {
    for (k, w) in out.iter_mut().enumerate().take(1 << n) {
        *w = (0..n)
            .map(|a| if (k >> a) & 1 == 1 { s[a] } else { 1.0 - s[a] })
            .product();
    }
}

fn multilinear_jacobian(n: usize, s: &[f64; 3], positions: &[[f64; 3]]) -> [[f64; 3]; 3] {
    let mut jac = [[0.0; 3]; 3];
    for (k, p) in positions.iter().enumerate() {
        for a in 0..n {
            let mut dw = if (k >> a) & 1 == 1 { 1.0 } else { -1.0 };
            for b in (0..n).filter(|&b| b != a) {
                dw *= if (k >> b) & 1 == 1 { s[b] } else { 1.0 - s[b] };
            }
            for (row, pi) in jac.iter_mut().zip(p).take(n) {
                row[a] += dw * pi;
            }
        }
    }
    jac
}

/// Gaussian elimination with partial pivoting for systems of size <= 3.
fn solve_small(n: usize, mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn combine(lat: &Lattice, st: &Stencil) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (node, w) in st.iter() {
            let a = lat.mask().anchor(node);
            for axis in 0..lat.dim() {
                p[axis] += w * a[axis];
            }
        }
        p
    }

    #[test]
    fn snapped_cells_reproduce_points_inside_the_disk() {
        let disk = Domain::unit_ball(2).unwrap();
        let lat = Lattice::new(disk.clone(), GridSpec::tight_uniform(&disk, 33).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = lat.grid().min_spacing();
        let mut worst: f64 = 0.0;
        for _ in 0..20_000 {
            let r: f64 = 1.0 - rng.random::<f64>() * 2.0 * h;
            let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let x = [r * t.cos(), r * t.sin()];
            let st = lat.weights(&x).unwrap();
            assert!(st.iter().all(|(_, w)| w >= 0.0));
            assert!((st.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-14);
            let p = combine(&lat, &st);
            worst = worst.max((p[0] - x[0]).hypot(p[1] - x[1]));
        }
        // Only the thin sliver between a chord and the arc is out of reach.
        assert!(worst < h * h, "worst anchor reproduction error {worst}");
    }

    #[test]
    fn partial_cells_redistribute_exterior_weight() {
        let grid = GridSpec::new(&[0.0, 0.0], &[2.0, 2.0], &[3, 3]).unwrap();
        let mut labels = vec![NodeLabel::Boundary; 9];
        labels[4] = NodeLabel::Interior;
        labels[8] = NodeLabel::Exterior;
        let mask = NodeMask::from_labels(&grid, labels).unwrap();
        let lat = Lattice::with_mask(
            Domain::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap(),
            grid,
            mask,
        );
        let st = lat.weights(&[1.5, 1.5]).unwrap();
        let by_node: Vec<(usize, f64)> = st.iter().collect();
        assert!(by_node.iter().any(|&(n, w)| n == 8 && w == 0.0));
        for &(n, w) in &by_node {
            if n != 8 {
                assert!((w - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn small_solver_matches_known_solution() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = solve_small(3, a, [3.0, 5.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
