//! Scalar fields on a masked lattice.
//!
//! Every evaluation is a convex combination of node values, so sup norms
//! never grow under interpolation. Exterior nodes hold NaN and are never read.

mod boundary;
pub mod csv;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Lattice, NodeLabel};

pub(crate) use boundary::boundary_angle;
pub use boundary::{BoundaryData, BoundaryValues};

/// Whether two lattices share grid and labels.
pub(crate) fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
    Arc::ptr_eq(a, b) || (a.grid() == b.grid() && a.mask().labels() == b.mask().labels())
}

/// Values of a function at the nodes of a [`Lattice`].
///
/// Interior nodes hold the value at the node itself, boundary nodes the value
/// at their anchor on the boundary.
#[derive(Debug, Clone)]
pub struct GridField {
    lattice: Arc<Lattice>,
    values: Vec<f64>,
}

impl GridField {
    /// Samples `f` at every interior node and at every boundary anchor.
    pub fn from_fn(lattice: Arc<Lattice>, f: impl Fn(&[f64]) -> f64) -> Self {
        let n = lattice.dim();
        let mask = lattice.mask();
        let values = (0..lattice.grid().len())
            .map(|i| match mask.label(i) {
                NodeLabel::Exterior => f64::NAN,
                _ => f(&mask.anchor(i)[..n]),
            })
            .collect();
        GridField { lattice, values }
    }

    /// Samples `interior` at interior nodes and `boundary` at boundary anchors.
    pub fn with_boundary(
        lattice: Arc<Lattice>,
        interior: impl Fn(&[f64]) -> f64,
        boundary: &BoundaryData,
    ) -> Self {
        let n = lattice.dim();
        let mask = lattice.mask();
        let values = (0..lattice.grid().len())
            .map(|i| match mask.label(i) {
                NodeLabel::Exterior => f64::NAN,
                NodeLabel::Interior => interior(&mask.anchor(i)[..n]),
                NodeLabel::Boundary => boundary.value_at(lattice.domain(), &mask.anchor(i)[..n]),
            })
            .collect();
        GridField { lattice, values }
    }

    pub fn constant(lattice: Arc<Lattice>, c: f64) -> Self {
        Self::from_fn(lattice, |_| c)
    }

    /// Wraps raw node values; exterior entries are replaced by NaN and every
    /// other entry must be finite.
    pub fn from_values(lattice: Arc<Lattice>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.grid().len() {
            return Err(Error::LatticeMismatch);
        }
        for (i, v) in values.iter_mut().enumerate() {
            match lattice.mask().label(i) {
                NodeLabel::Exterior => *v = f64::NAN,
                _ if !v.is_finite() => {
                    return Err(Error::InvalidGrid(format!(
                        "non-finite value {v} at node {i}"
                    )))
                }
                _ => {}
            }
        }
        Ok(GridField { lattice, values })
    }

    pub(crate) fn from_raw(lattice: Arc<Lattice>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), lattice.grid().len());
        GridField { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Indices of interior and boundary nodes, in increasing order.
    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.lattice.mask();
        (0..self.values.len()).filter(move |&i| mask.label(i) != NodeLabel::Exterior)
    }

    /// Value at a point of the closed domain by convex-combination
    /// interpolation. Points up to `1e-6` spacings outside are accepted.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let sd = self.lattice.domain().signed_distance(x);
        if sd < -1e-6 * self.lattice.grid().min_spacing() {
            return Err(Error::OutsideDomain(sd));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let st = self
            .lattice
            .weights(x)
            .expect("point of the closed domain in a cell with no admissible corner");
        st.iter()
            .filter(|&(_, w)| w != 0.0)
            .map(|(node, w)| {
                debug_assert!(self.lattice.mask().label(node) != NodeLabel::Exterior);
                w * self.values[node]
            })
            .sum()
    }

    /// Largest absolute value over interior and boundary nodes.
    pub fn sup_norm(&self) -> f64 {
        self.active_nodes()
            .map(|i| self.values[i].abs())
            .fold(0.0, f64::max)
    }

    /// `(min, max)` over interior and boundary nodes.
    pub fn range(&self) -> (f64, f64) {
        self.active_nodes()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                (lo.min(self.values[i]), hi.max(self.values[i]))
            })
    }

    fn check_same_lattice(&self, other: &GridField) -> Result<()> {
        if same_lattice(&self.lattice, &other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// Sup norm of the nodewise difference.
    pub fn sup_diff(&self, other: &GridField) -> Result<f64> {
        self.sup_diff_where(other, |_| true)
    }

    /// Sup norm of the nodewise difference restricted to active nodes whose
    /// anchor satisfies `keep`.
    pub fn sup_diff_where(&self, other: &GridField, keep: impl Fn(&[f64]) -> bool) -> Result<f64> {
        self.check_same_lattice(other)?;
        let n = self.lattice.dim();
        let mask = self.lattice.mask();
        Ok(self
            .active_nodes()
            .filter(|&i| keep(&mask.anchor(i)[..n]))
            .map(|i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max))
    }

    /// Nodewise combination of two fields on the same lattice.
    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<GridField> {
        self.check_same_lattice(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| if a.is_nan() { f64::NAN } else { f(a, b) })
            .collect();
        Ok(GridField::from_raw(self.lattice.clone(), values))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        let values = self
            .values
            .iter()
            .map(|&v| if v.is_nan() { v } else { f(v) })
            .collect();
        GridField::from_raw(self.lattice.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, GridSpec};
    use proptest::prelude::*;

    fn lattice(domain: Domain, nodes: usize) -> Arc<Lattice> {
        let grid = GridSpec::tight_uniform(&domain, nodes).unwrap();
        Arc::new(Lattice::new(domain, grid).unwrap())
    }

    fn disk(nodes: usize) -> Arc<Lattice> {
        lattice(Domain::unit_ball(2).unwrap(), nodes)
    }

    #[test]
    fn eval_examples() {
        let lat = disk(17);
        let c = GridField::constant(lat.clone(), 2.5);
        assert_eq!(c.eval(&[0.3, -0.61]).unwrap(), 2.5);

        let unit = lattice(Domain::interval(0.0, 1.0).unwrap(), 5);
        let f = GridField::from_values(unit, vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(f.eval(&[0.375]).unwrap(), 0.375);

        let square = lattice(Domain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 101);
        let g = GridField::from_fn(square, |x| x[0]);
        assert!((g.eval(&[0.3, 0.4]).unwrap() - 0.3).abs() < 1e-12);

        assert!(matches!(c.eval(&[1.5, 0.0]), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn eval_reproduces_affine_functions_on_inner_cells() {
        let lat = disk(33);
        let f = GridField::from_fn(lat.clone(), |x| 0.7 - 1.3 * x[0] + 0.4 * x[1]);
        for i in 0..200 {
            let t = i as f64 * 0.1;
            let x = [
                0.8 * (i as f64 / 200.0) * t.cos(),
                0.8 * (i as f64 / 200.0) * t.sin(),
            ];
            let exact = 0.7 - 1.3 * x[0] + 0.4 * x[1];
            assert!((f.eval(&x).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn sup_norm_examples() {
        let lat = disk(65);
        assert_eq!(GridField::constant(lat.clone(), 0.0).sup_norm(), 0.0);
        let saddle = GridField::from_fn(lat.clone(), |x| x[0] * x[0] - x[1] * x[1]);
        assert!((saddle.sup_norm() - 1.0).abs() < 1e-12);
        let mut spike = GridField::constant(lat.clone(), 0.0);
        spike.values_mut()[lat.mask().interior()[17]] = -3.0;
        assert_eq!(spike.sup_norm(), 3.0);
    }

    #[test]
    fn sup_diff_examples() {
        let lat = disk(65);
        let zero = GridField::constant(lat.clone(), 0.0);
        let h = GridField::from_fn(lat.clone(), |x| (1.0 - x[0] * x[0] - x[1] * x[1]) / 4.0);
        assert_eq!(zero.sup_diff(&zero).unwrap(), 0.0);
        assert!((zero.sup_diff(&h).unwrap() - 0.25).abs() < 1e-12);
        let other = GridField::constant(disk(33), 0.0);
        assert!(matches!(zero.sup_diff(&other), Err(Error::LatticeMismatch)));
    }

    fn random_field(lat: &Arc<Lattice>, seed: u64, scale: f64) -> GridField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values = (0..lat.grid().len())
            .map(|_| scale * rng.random_range(-1.0..1.0))
            .collect();
        GridField::from_values(lat.clone(), values).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sup_norm_is_a_norm(seed in any::<u64>(), k in -5.0f64..5.0) {
            let lat = disk(21);
            let a = random_field(&lat, seed, 1.0);
            let b = random_field(&lat, seed ^ 0x9e37, 2.0);
            let scaled = a.map(|v| k * v);
            prop_assert!((scaled.sup_norm() - k.abs() * a.sup_norm()).abs() <= 1e-12);
            let sum = a.zip_with(&b, |x, y| x + y).unwrap();
            prop_assert!(sum.sup_norm() <= a.sup_norm() + b.sup_norm() + 1e-12);
            prop_assert_eq!(a.sup_diff(&b).unwrap(), b.sup_diff(&a).unwrap());
        }

        #[test]
        fn eval_stays_in_the_node_range(seed in any::<u64>(), r in 0.0f64..1.0, t in 0.0f64..6.3) {
            let lat = disk(21);
            let a = random_field(&lat, seed, 1.0);
            let (lo, hi) = a.range();
            let v = a.eval(&[r * t.cos(), r * t.sin()]).unwrap();
            prop_assert!(lo - 1e-15 <= v && v <= hi + 1e-15);
        }
    }
}
