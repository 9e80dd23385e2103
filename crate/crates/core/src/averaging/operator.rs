use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stencil::place_template;
use super::{BallStencil, QuadratureSpec, RadiusSpec, RADIUS_SHRINK};
use crate::error::{Error, Result};
use crate::field::{same_lattice, BoundaryValues, GridField};
use crate::geometry::{dist, CellKind, Lattice, NodeLabel};

/// Sparse row of node weights.
type Row = Vec<(usize, f64)>;

/// Quadrature defects of one stencil, used to bound `σ(u)(x) − u(x)` for
/// smooth `u` with `Δu = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilDefects {
    pub delta: f64,
    /// `|Σ w_i (p_i − x)|`.
    pub first_moment: f64,
    /// Frobenius norm of `Σ w_i (p_i − x)(p_i − x)ᵀ − δ²/(n+2) I`.
    pub second_moment: f64,
    /// `Σ_i w_i Σ_v w_iv |P_v − p_i|²` over interpolation corners `P_v`.
    pub spread: f64,
    /// `Σ_i w_i |Σ_v w_iv P_v − p_i|`: failure to reproduce affine functions.
    pub affine: f64,
}

impl StencilDefects {
    /// Bound on `|σ(u)(x) − u(x) − δ²Δu(x)/(2(n+2))|` for a quadratic `u`
    /// with gradient bounded by `grad` near the stencil and Hessian norm
    /// `hess`. For harmonic `u` this bounds the one-step residual, up to
    /// fourth-order terms.
    pub fn budget(&self, dim: usize, grad: f64, hess: f64) -> f64 {
        grad * (self.first_moment + self.affine)
            + 0.5 * hess * ((dim as f64).sqrt() * self.second_moment + self.spread)
    }
}

/// σ on one lattice with fixed radius function and quadrature.
///
/// Stencils are laid out once. Balls that only meet regular cells are
/// evaluated from the shared template on the fly; balls reaching cut cells
/// are compiled into sparse node rows.
#[derive(Debug, Clone)]
pub struct AveragingOperator {
    lattice: Arc<Lattice>,
    radius: RadiusSpec,
    quad: QuadratureSpec,
    template: Vec<[f64; 3]>,
    weights: Vec<f64>,
    /// `δ_x` per interior node, aligned with `mask().interior()`.
    deltas: Vec<f64>,
    rows: Vec<Option<Row>>,
    /// Position of each node in the interior or boundary list.
    slot: Vec<usize>,
}

impl AveragingOperator {
    pub fn new(lattice: Arc<Lattice>, radius: RadiusSpec, quad: QuadratureSpec) -> Result<Self> {
        radius.validate()?;
        let n = lattice.dim();
        let (template, weights) = quad.unit_ball_rule(n)?;
        let mask = lattice.mask();
        if template.len() < 1 << n {
            return Err(Error::UnderResolvedStencil {
                node: mask.interior()[0],
                kept: template.len(),
                needed: 1 << n,
            });
        }
        let deltas: Vec<f64> = mask
            .interior()
            .iter()
            .map(|&i| radius.delta(mask.signed_distance(i)))
            .collect();
        let mut slot = vec![usize::MAX; lattice.grid().len()];
        for (k, &i) in mask.interior().iter().enumerate() {
            slot[i] = k;
        }
        for (k, &i) in mask.boundary().iter().enumerate() {
            slot[i] = k;
        }
        let mut op = AveragingOperator {
            lattice,
            radius,
            quad,
            template,
            weights,
            deltas,
            rows: Vec::new(),
            slot,
        };
        op.rows = op
            .lattice
            .mask()
            .interior()
            .par_iter()
            .enumerate()
            .map(|(k, &node)| op.compile_if_needed(k, node))
            .collect();
        Ok(op)
    }

    fn point(&self, node: usize, delta: f64, a: &[f64; 3]) -> [f64; 3] {
        let x = self.lattice.grid().node_point(node);
        let r = delta * RADIUS_SHRINK;
        let mut p = [0.0; 3];
        for axis in 0..self.lattice.dim() {
            p[axis] = x[axis] + r * a[axis];
        }
        p
    }

    fn compile_if_needed(&self, k: usize, node: usize) -> Option<Row> {
        let n = self.lattice.dim();
        let grid = self.lattice.grid();
        let mask = self.lattice.mask();
        let delta = self.deltas[k];
        let regular = self.template.iter().all(|a| {
            let (mi, _) = grid.locate(&self.point(node, delta, a)[..n]);
            mask.cell_kind(grid.cell_index(&mi[..n])) == CellKind::Regular
        });
        if regular {
            return None;
        }
        let mut entries: Row = Vec::with_capacity(self.template.len() * (1 << n));
        for (a, w) in self.template.iter().zip(&self.weights) {
            let p = self.point(node, delta, a);
            let st = self
                .lattice
                .weights(&p[..n])
                .expect("stencil point inside the domain fell in an outside cell");
            entries.extend(
                st.iter()
                    .filter(|&(_, v)| v != 0.0)
                    .map(|(j, v)| (j, w * v)),
            );
        }
        entries.sort_by_key(|&(j, _)| j);
        let mut row: Row = Vec::with_capacity(entries.len());
        for (j, v) in entries {
            match row.last_mut() {
                Some((last, acc)) if *last == j => *acc += v,
                _ => row.push((j, v)),
            }
        }
        Some(row)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn radius_spec(&self) -> &RadiusSpec {
        &self.radius
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Number of points in every stencil.
    pub fn points_per_stencil(&self) -> usize {
        self.template.len()
    }

    /// Number of interior nodes whose stencil was compiled to a sparse row.
    pub fn compiled_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    /// `δ_x` at an interior node.
    pub fn delta(&self, node: usize) -> Result<f64> {
        self.interior_slot(node).map(|k| self.deltas[k])
    }

    fn interior_slot(&self, node: usize) -> Result<usize> {
        if node < self.slot.len() && self.lattice.mask().label(node) == NodeLabel::Interior {
            Ok(self.slot[node])
        } else {
            Err(Error::NotInterior(node))
        }
    }

    /// The ball quadrature at an interior node.
    pub fn stencil(&self, node: usize) -> Result<BallStencil> {
        let k = self.interior_slot(node)?;
        place_template(
            &self.lattice,
            node,
            self.deltas[k],
            &self.template,
            &self.weights,
            &self.quad,
        )
    }

    /// Template mean at a node whose ball only meets regular cells.
    fn average_regular<const N: usize>(&self, values: &[f64], node: usize, delta: f64) -> f64 {
        let grid = self.lattice.grid();
        let x = grid.node_point(node);
        let r = delta * RADIUS_SHRINK;
        let mut lo = [0.0; N];
        let mut inv = [0.0; N];
        let mut last = [0usize; N];
        let mut stride = [1usize; N];
        for a in 0..N {
            lo[a] = grid.lo()[a];
            inv[a] = 1.0 / grid.spacing()[a];
            last[a] = grid.nodes()[a] - 2;
            if a > 0 {
                stride[a] = stride[a - 1] * grid.nodes()[a - 1];
            }
        }
        let mut acc = 0.0;
        for (t, w) in self.template.iter().zip(&self.weights) {
            let mut base = 0;
            let mut s = [0.0; N];
            for a in 0..N {
                let u = (x[a] + r * t[a] - lo[a]) * inv[a];
                let i = (u.floor().max(0.0) as usize).min(last[a]);
                s[a] = u - i as f64;
                base += i * stride[a];
            }
            let v = match N {
                1 => values[base] + s[0] * (values[base + 1] - values[base]),
                2 => {
                    let (b0, b1) = (base, base + stride[1]);
                    let lower = values[b0] + s[0] * (values[b0 + 1] - values[b0]);
                    let upper = values[b1] + s[0] * (values[b1 + 1] - values[b1]);
                    lower + s[1] * (upper - lower)
                }
                _ => {
                    let face = |b: usize| {
                        let b1 = b + stride[1];
                        let lower = values[b] + s[0] * (values[b + 1] - values[b]);
                        let upper = values[b1] + s[0] * (values[b1 + 1] - values[b1]);
                        lower + s[1] * (upper - lower)
                    };
                    let near = face(base);
                    near + s[2] * (face(base + stride[2]) - near)
                }
            };
            acc += w * v;
        }
        acc
    }

    fn average(&self, values: &[f64], k: usize, node: usize) -> f64 {
        match &self.rows[k] {
            Some(row) => row.iter().map(|&(j, w)| w * values[j]).sum(),
            None => match self.lattice.dim() {
                1 => self.average_regular::<1>(values, node, self.deltas[k]),
                2 => self.average_regular::<2>(values, node, self.deltas[k]),
                _ => self.average_regular::<3>(values, node, self.deltas[k]),
            },
        }
    }

    fn check(&self, f: &GridField, boundary: &BoundaryValues) -> Result<()> {
        if !same_lattice(&self.lattice, f.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        if boundary.len() != self.lattice.mask().boundary().len() {
            return Err(Error::Precondition(format!(
                "{} boundary values for {} boundary nodes",
                boundary.len(),
                self.lattice.mask().boundary().len()
            )));
        }
        Ok(())
    }

    /// `σ(f)`: ball means at interior nodes, `boundary` at boundary nodes.
    pub fn apply(&self, f: &GridField, boundary: &BoundaryValues) -> Result<GridField> {
        let mut out = GridField::from_raw(self.lattice.clone(), vec![f64::NAN; f.values().len()]);
        self.apply_into(f, boundary, &mut out)?;
        Ok(out)
    }

    /// Writes `σ(f)` into `out`, which must live on the same lattice.
    pub fn apply_into(
        &self,
        f: &GridField,
        boundary: &BoundaryValues,
        out: &mut GridField,
    ) -> Result<()> {
        self.check(f, boundary)?;
        if !same_lattice(&self.lattice, out.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let values = f.values();
        let mask = self.lattice.mask();
        out.values_mut()
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, v)| {
                *v = match mask.label(i) {
                    NodeLabel::Interior => self.average(values, self.slot[i], i),
                    NodeLabel::Boundary => boundary.get(self.slot[i]),
                    NodeLabel::Exterior => f64::NAN,
                }
            });
        Ok(())
    }

    /// Quadrature defects of the stencil at an interior node.
    pub fn defects(&self, node: usize) -> Result<StencilDefects> {
        let n = self.lattice.dim();
        let st = self.stencil(node)?;
        let mask = self.lattice.mask();
        let x = st.center;
        let mut first = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        let (mut spread, mut affine) = (0.0, 0.0);
        for (p, w) in st.points.iter().zip(&st.weights) {
            for a in 0..n {
                let da = p[a] - x[a];
                first[a] += w * da;
                for b in 0..n {
                    second[a][b] += w * da * (p[b] - x[b]);
                }
            }
            let interp = self
                .lattice
                .weights(&p[..n])
                .expect("stencil point in an outside cell");
            let mut image = [0.0; 3];
            for (j, v) in interp.iter() {
                let q = mask.anchor(j);
                spread += w * v * dist(&q[..n], &p[..n]).powi(2);
                for a in 0..n {
                    image[a] += v * q[a];
                }
            }
            affine += w * dist(&image[..n], &p[..n]);
        }
        let target = st.radius * st.radius / (n + 2) as f64;
        let mut frob = 0.0;
        for a in 0..n {
            for b in 0..n {
                let e = second[a][b] - if a == b { target } else { 0.0 };
                frob += e * e;
            }
        }
        Ok(StencilDefects {
            delta: st.radius,
            first_moment: first[..n].iter().map(|v| v * v).sum::<f64>().sqrt(),
            second_moment: frob.sqrt(),
            spread,
            affine,
        })
    }

    /// Empirical constants in the continuity estimate
    /// `|σf(x) − σf(y)| ≤ C ‖f‖∞ (|δ_x − δ_y| + d(x, y)) / δ_x`, one per pair.
    ///
    /// Every pair must join two distinct interior nodes with
    /// `d(x, y) < δ_x / 2`. A zero field gives zero ratios.
    pub fn lipschitz_probe(
        &self,
        f: &GridField,
        boundary: &BoundaryValues,
        pairs: &[(usize, usize)],
    ) -> Result<Vec<f64>> {
        let n = self.lattice.dim();
        let grid = self.lattice.grid();
        for &(x, y) in pairs {
            let dx = self.delta(x)?;
            self.delta(y)?;
            let d = dist(&grid.node_point(x)[..n], &grid.node_point(y)[..n]);
            if !(d > 0.0 && d < 0.5 * dx) {
                return Err(Error::Precondition(format!(
                    "pair ({x}, {y}) at distance {d} violates 0 < d < δ_x/2 = {}",
                    0.5 * dx
                )));
            }
        }
        let sf = self.apply(f, boundary)?;
        let norm = f.sup_norm();
        Ok(pairs
            .iter()
            .map(|&(x, y)| {
                if norm == 0.0 {
                    return 0.0;
                }
                let (dx, dy) = (self.deltas[self.slot[x]], self.deltas[self.slot[y]]);
                let d = dist(&grid.node_point(x)[..n], &grid.node_point(y)[..n]);
                (sf.value(x) - sf.value(y)).abs() * dx / (norm * ((dx - dy).abs() + d))
            })
            .collect())
    }

    /// Up to `count` random pairs of lattice-adjacent interior nodes meeting
    /// the probe's precondition, drawn deterministically from `seed`.
    pub fn adjacent_pairs(&self, count: usize, seed: u64) -> Vec<(usize, usize)> {
        let n = self.lattice.dim();
        let grid = self.lattice.grid();
        let mask = self.lattice.mask();
        let interior = mask.interior();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::with_capacity(count);
        let mut attempts = 0;
        while pairs.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let x = interior[rng.random_range(0..interior.len())];
            let axis = rng.random_range(0..n);
            let mut mi = grid.multi_index(x);
            let up = rng.random_bool(0.5);
            if up && mi[axis] + 1 < grid.nodes()[axis] {
                mi[axis] += 1;
            } else if !up && mi[axis] > 0 {
                mi[axis] -= 1;
            } else {
                continue;
            }
            let y = grid.flat_index(&mi[..n]);
            if mask.label(y) != NodeLabel::Interior {
                continue;
            }
            if grid.spacing()[axis] < 0.5 * self.deltas[self.slot[x]] {
                pairs.push((x, y));
            }
        }
        pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BoundaryData;
    use crate::geometry::{Domain, GridSpec};

    fn disk_op(nodes: usize) -> AveragingOperator {
        let d = Domain::unit_ball(2).unwrap();
        let grid = GridSpec::tight_uniform(&d, nodes).unwrap();
        let lat = Arc::new(Lattice::new(d, grid).unwrap());
        AveragingOperator::new(lat, RadiusSpec::default(), QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn constants_are_fixed() {
        let op = disk_op(33);
        let c = GridField::constant(op.lattice().clone(), 1.75);
        let b = BoundaryValues::from_field(&c);
        let s = op.apply(&c, &b).unwrap();
        assert!(s.sup_diff(&c).unwrap() <= 1e-14);
    }

    #[test]
    fn linear_function_on_the_interval() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let grid = GridSpec::tight_uniform(&d, 101).unwrap();
        let lat = Arc::new(Lattice::new(d, grid).unwrap());
        let op = AveragingOperator::new(
            lat.clone(),
            RadiusSpec::default(),
            QuadratureSpec::default(),
        )
        .unwrap();
        let f = GridField::from_fn(lat.clone(), |x| x[0]);
        let b = BoundaryValues::sample(
            &lat,
            &BoundaryData::Endpoints {
                lower: 0.0,
                upper: 1.0,
            },
        )
        .unwrap();
        let s = op.apply(&f, &b).unwrap();
        assert!(s.sup_diff(&f).unwrap() <= 1e-10);
    }

    #[test]
    fn mean_of_squared_radius_at_the_center() {
        let op = disk_op(129);
        let lat = op.lattice().clone();
        let f = GridField::from_fn(lat.clone(), |x| x[0] * x[0] + x[1] * x[1]);
        let b = BoundaryValues::from_field(&f);
        let s = op.apply(&f, &b).unwrap();
        let center = lat.grid().flat_index(&[64, 64]);
        let delta = op.delta(center).unwrap();
        // Independent Monte Carlo estimate of the mean of |z|² over B(0, δ).
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (mut sum, mut count) = (0.0, 0usize);
        while count < 1_000_000 {
            let z: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let r2 = z[0] * z[0] + z[1] * z[1];
            if r2 < 1.0 {
                sum += r2 * delta * delta;
                count += 1;
            }
        }
        let mc = sum / count as f64;
        assert!((mc - delta * delta / 2.0).abs() < 2e-3 * delta * delta);
        // Quadrature budget: second-moment defect of the 16² rule plus interpolation spread.
        let defects = op.defects(center).unwrap();
        let budget = defects.budget(2, 0.0, 2.0);
        assert!(
            (s.value(center) - delta * delta / 2.0).abs() <= budget,
            "{} vs {}",
            s.value(center),
            budget
        );
        assert!((s.value(center) - mc).abs() <= budget + 2e-3 * delta * delta);
    }

    #[test]
    fn boundary_values_are_pinned_exactly() {
        let op = disk_op(33);
        let lat = op.lattice().clone();
        let f = GridField::from_fn(lat.clone(), |x| x[0]);
        let data = BoundaryData::expression("sin(3*theta)").unwrap();
        let b = BoundaryValues::sample(&lat, &data).unwrap();
        let s = op.apply(&f, &b).unwrap();
        for (k, &i) in lat.mask().boundary().iter().enumerate() {
            assert_eq!(s.value(i), b.get(k));
        }
    }

    #[test]
    fn probe_examples() {
        let op = disk_op(65);
        let lat = op.lattice().clone();
        let pairs = op.adjacent_pairs(200, 1);
        assert!(pairs.len() > 150);
        let c = GridField::constant(lat.clone(), 2.0);
        let b = BoundaryValues::from_field(&c);
        assert!(op
            .lipschitz_probe(&c, &b, &pairs)
            .unwrap()
            .iter()
            .all(|&r| r == 0.0));
        let f = GridField::from_fn(lat.clone(), |x| x[0] * x[0] - x[1] * x[1]);
        let b = BoundaryValues::from_field(&f);
        assert!(op
            .lipschitz_probe(&f, &b, &pairs)
            .unwrap()
            .iter()
            .all(|r| r.is_finite()));
        let x = pairs[0].0;
        assert!(op.lipschitz_probe(&f, &b, &[(x, x)]).is_err());
    }
}
