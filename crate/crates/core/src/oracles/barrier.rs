use std::sync::Arc;

use crate::averaging::AveragingOperator;
use crate::error::{Error, Result};
use crate::field::{BoundaryValues, GridField};
use crate::geometry::{dist, Domain, Lattice, NodeLabel};
use crate::iteration::fixed_point_residual;

/// Nodes where `h` falls below this are left out of `K`.
const H_FLOOR: f64 = 1e-12;
/// Largest boundary disagreement `barrier_constant` tolerates.
const BOUNDARY_AGREEMENT: f64 = 1e-10;

/// `h(x) = (R² − |x − x₀|²)/(2n)` on a ball: `Δh = −1` inside, `h = 0` on
/// the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Barrier {
    center: Vec<f64>,
    radius: f64,
}

impl Barrier {
    /// Fails with `Unsupported` unless the domain is a ball or an interval.
    pub fn new(domain: &Domain) -> Result<Self> {
        let (center, radius) = domain.as_ball().ok_or_else(|| {
            Error::Unsupported("closed-form barrier exists only on balls and intervals".into())
        })?;
        Ok(Barrier { center, radius })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = dist(x, &self.center);
        (self.radius - r) * (self.radius + r) / (2 * self.center.len()) as f64
    }

    /// Values at interior nodes and boundary anchors.
    pub fn sample(&self, lattice: &Arc<Lattice>) -> GridField {
        GridField::from_fn(lattice.clone(), |x| self.eval(x))
    }
}

/// The smallest `K` with `|f₀ − u| ≤ K h` at the retained nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConstant {
    pub k: f64,
    /// Node where the ratio peaks.
    pub argmax: Option<usize>,
    /// Interior nodes skipped because `h < 1e-12`.
    pub excluded: Vec<usize>,
}

/// `K = max |f₀ − u| / h` over interior nodes.
///
/// `f0` must agree with `u` at every boundary node to within `1e-10`.
pub fn barrier_constant(f0: &GridField, u: &GridField, h: &GridField) -> Result<BarrierConstant> {
    f0.sup_diff(u)?;
    f0.sup_diff(h)?;
    let mask = f0.lattice().mask();
    for &i in mask.boundary() {
        if (f0.value(i) - u.value(i)).abs() > BOUNDARY_AGREEMENT {
            return Err(Error::BoundaryMismatch {
                node: i,
                field: f0.value(i),
                oracle: u.value(i),
            });
        }
    }
    let mut out = BarrierConstant {
        k: 0.0,
        argmax: None,
        excluded: Vec::new(),
    };
    for &i in mask.interior() {
        if h.value(i) < H_FLOOR {
            out.excluded.push(i);
            continue;
        }
        let ratio = (f0.value(i) - u.value(i)).abs() / h.value(i);
        if ratio > out.k {
            out.k = ratio;
            out.argmax = Some(i);
        }
    }
    Ok(out)
}

/// Smallest value of `K h − |f − u|` and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub margin: f64,
    pub node: usize,
}

/// The bound `|f_n − u| ≤ K h`, checked with tolerance `tol`.
#[derive(Debug, Clone)]
pub struct Sandwich {
    pub u: GridField,
    pub h: GridField,
    pub k: f64,
    pub tol: f64,
}

impl Sandwich {
    pub fn new(u: GridField, h: GridField, k: f64, tol: f64) -> Result<Self> {
        u.sup_diff(&h)?;
        Ok(Sandwich { u, h, k, tol })
    }

    pub fn min_margin(&self, f: &GridField) -> Result<Margin> {
        f.sup_diff(&self.u)?;
        let mut worst = Margin {
            margin: f64::INFINITY,
            node: usize::MAX,
        };
        let mask = f.lattice().mask();
        for i in f.active_nodes() {
            let h = if mask.label(i) == NodeLabel::Boundary {
                self.h.value(i).max(0.0)
            } else {
                self.h.value(i)
            };
            let m = self.k * h - (f.value(i) - self.u.value(i)).abs();
            if m < worst.margin {
                worst = Margin { margin: m, node: i };
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub min_margin: f64,
    pub node: usize,
    pub tol: f64,
    pub passed: bool,
}

/// Checks `|f − u| ≤ K h + tol` at every node.
pub fn check_barrier_sandwich(f: &GridField, sandwich: &Sandwich) -> Result<SandwichReport> {
    let m = sandwich.min_margin(f)?;
    Ok(SandwichReport {
        min_margin: m.margin,
        node: m.node,
        tol: sandwich.tol,
        passed: m.margin >= -sandwich.tol,
    })
}

/// Ten times the one-step residual of the oracle on the lattice.
pub fn sandwich_tolerance(
    op: &AveragingOperator,
    u: &GridField,
    boundary: &BoundaryValues,
) -> Result<f64> {
    Ok(10.0 * fixed_point_residual(op, u, boundary)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use crate::oracles::fd_laplacian;

    fn disk(nodes: usize) -> Arc<Lattice> {
        let d = Domain::unit_ball(2).unwrap();
        Arc::new(Lattice::new(d.clone(), GridSpec::tight_uniform(&d, nodes).unwrap()).unwrap())
    }

    #[test]
    fn barrier_examples() {
        let h = Barrier::new(&Domain::unit_ball(2).unwrap()).unwrap();
        assert_eq!(h.eval(&[0.0, 0.0]), 0.25);
        assert!(h.eval(&[0.6, 0.8]).abs() < 1e-16);
        assert!((fd_laplacian(|x| h.eval(x), &[0.2, -0.3], 1e-4) + 1.0).abs() < 1e-6);
        let line = Barrier::new(&Domain::interval(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(line.eval(&[0.0]), 0.5);
        assert!((fd_laplacian(|x| line.eval(x), &[0.3], 1e-4) + 1.0).abs() < 1e-6);
        let square = Domain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(Barrier::new(&square), Err(Error::Unsupported(_))));
    }

    #[test]
    fn barrier_constant_examples() {
        let lat = disk(65);
        let u = GridField::from_fn(lat.clone(), |x| x[0] * x[0] - x[1] * x[1]);
        let h = Barrier::new(lat.domain()).unwrap().sample(&lat);
        assert_eq!(barrier_constant(&u, &u, &h).unwrap().k, 0.0);
        let plus_h = u.zip_with(&h, |a, b| a + b).unwrap();
        assert!((barrier_constant(&plus_h, &u, &h).unwrap().k - 1.0).abs() < 1e-10);
        let shifted = u.map(|v| v + 1e-6);
        assert!(matches!(
            barrier_constant(&shifted, &u, &h),
            Err(Error::BoundaryMismatch { .. })
        ));
    }

    #[test]
    fn sandwich_holds_with_zero_margin_at_the_start() {
        let lat = disk(33);
        let u = GridField::from_fn(lat.clone(), |x| x[0]);
        let h = Barrier::new(lat.domain()).unwrap().sample(&lat);
        let f0 = GridField::from_fn(lat.clone(), |x| {
            x[0] + 0.3 * (1.0 - x[0] * x[0] - x[1] * x[1]).powi(2)
        });
        let k = barrier_constant(&f0, &u, &h).unwrap().k;
        let s = Sandwich::new(u.clone(), h, k, 0.0).unwrap();
        let report = check_barrier_sandwich(&f0, &s).unwrap();
        assert!(report.min_margin >= -1e-10 && report.passed);
        assert!(check_barrier_sandwich(&u, &s).unwrap().min_margin >= 0.0);
    }
}
