//! Reference solutions, the barrier bound and the convex-hull oracle.

mod barrier;
mod hull;
mod poisson;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{BoundaryData, GridField};
use crate::geometry::{dist, Domain, Lattice, NodeLabel};

pub use barrier::{
    barrier_constant, check_barrier_sandwich, sandwich_tolerance, Barrier, BarrierConstant, Margin,
    Sandwich, SandwichReport,
};
pub use hull::{hull_membership, HullOutcome, HullRefusal, HullWitness};
pub use poisson::{poisson_solution, PoissonDisk, POISSON_NODES};

/// `Re((x₁ + i·x₂)^k)`; harmonic in any dimension ≥ 2.
pub fn harmonic_poly(k: u32, x: &[f64]) -> f64 {
    let (a, b) = (x[0], x.get(1).copied().unwrap_or(0.0));
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..k {
        (re, im) = (re * a - im * b, re * b + im * a);
    }
    re
}

/// A closed-form harmonic function used as ground truth.
#[derive(Debug, Clone)]
pub enum OracleSolution {
    /// `Re((x₁ + i·x₂)^k)`, `k ≤ 4`.
    HarmonicPoly { degree: u32 },
    /// Poisson integral of boundary data on a disk.
    PoissonIntegral(Arc<PoissonDisk>),
    /// The affine function with values `a` at `lo` and `b` at `hi`.
    Linear1d { lo: f64, hi: f64, a: f64, b: f64 },
    /// Fundamental solution centered at a pole outside the closed domain:
    /// `|x − p|` in 1-D, `ln|x − p|` in 2-D, `1/|x − p|` in 3-D.
    FundamentalShifted { pole: Vec<f64> },
}

impl OracleSolution {
    pub fn harmonic_poly(degree: u32) -> Result<Self> {
        if degree > 4 {
            return Err(Error::Config(format!(
                "harmonic polynomial degree must be 0..=4, got {degree}"
            )));
        }
        Ok(OracleSolution::HarmonicPoly { degree })
    }

    /// Checks that the oracle is harmonic on `domain`.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        let n = domain.dim();
        match self {
            OracleSolution::HarmonicPoly { degree } if *degree > 4 => Err(Error::Config(format!(
                "harmonic polynomial degree must be 0..=4, got {degree}"
            ))),
            OracleSolution::HarmonicPoly { degree } if n == 1 && *degree > 1 => Err(
                Error::Unsupported(format!("Re(z^{degree}) is not harmonic on a 1-D domain")),
            ),
            OracleSolution::PoissonIntegral(p) if p.domain() != domain => Err(Error::Unsupported(
                "Poisson oracle was built for a different disk".into(),
            )),
            OracleSolution::Linear1d { .. } if n != 1 => Err(Error::Unsupported(
                "linear_1d oracle needs a 1-D domain".into(),
            )),
            OracleSolution::FundamentalShifted { pole } => {
                if pole.len() != n {
                    Err(Error::Config(format!(
                        "pole has {} coordinates, domain has {n}",
                        pole.len()
                    )))
                } else if domain.signed_distance(pole) >= 0.0 {
                    Err(Error::Config(
                        "pole must lie outside the closed domain".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Smoothness class, recorded as metadata only.
    pub fn smoothness(&self) -> &'static str {
        match self {
            OracleSolution::HarmonicPoly { .. } => "polynomial",
            OracleSolution::PoissonIntegral(_) => {
                "harmonic inside, as smooth as the data on the boundary"
            }
            OracleSolution::Linear1d { .. } => "affine",
            OracleSolution::FundamentalShifted { .. } => "analytic on the closed domain",
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            OracleSolution::HarmonicPoly { degree } => harmonic_poly(*degree, x),
            OracleSolution::PoissonIntegral(p) => return p.eval(x),
            OracleSolution::Linear1d { lo, hi, a, b } => a + (b - a) * (x[0] - lo) / (hi - lo),
            OracleSolution::FundamentalShifted { pole } => {
                let r = dist(x, pole);
                match pole.len() {
                    1 => r,
                    2 => r.ln(),
                    _ => 1.0 / r,
                }
            }
        })
    }

    /// Boundary values of the oracle.
    pub fn boundary_data(&self) -> BoundaryData {
        match self {
            OracleSolution::PoissonIntegral(p) => p.data().clone(),
            other => {
                let me = other.clone();
                BoundaryData::function(move |x| me.eval(x).unwrap_or(f64::NAN))
            }
        }
    }

    /// The oracle on a lattice: values at interior nodes and at boundary
    /// anchors (boundary data itself for the Poisson oracle).
    pub fn sample(&self, lattice: &Arc<Lattice>) -> Result<GridField> {
        self.validate(lattice.domain())?;
        let n = lattice.dim();
        let mask = lattice.mask();
        let mut values = vec![f64::NAN; lattice.grid().len()];
        let boundary = self.boundary_data();
        for (i, v) in values.iter_mut().enumerate() {
            let x = &mask.anchor(i)[..n];
            *v = match mask.label(i) {
                NodeLabel::Exterior => continue,
                NodeLabel::Boundary => boundary.value_at(lattice.domain(), x),
                NodeLabel::Interior => self.eval(x)?,
            };
        }
        GridField::from_values(lattice.clone(), values)
    }
}

/// Second-order centered finite-difference Laplacian of `f` at `x`.
pub fn fd_laplacian(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], step: f64) -> f64 {
    let fx = f(x);
    let mut y = x.to_vec();
    let mut acc = 0.0;
    for a in 0..x.len() {
        y[a] = x[a] + step;
        let plus = f(&y);
        y[a] = x[a] - step;
        let minus = f(&y);
        y[a] = x[a];
        acc += plus - 2.0 * fx + minus;
    }
    acc / (step * step)
}

/// Random points of `domain` at least `margin` away from its boundary.
pub fn random_interior_points(
    domain: &Domain,
    count: usize,
    margin: f64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let (lo, hi) = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| rng.random_range(*l..*h))
            .collect();
        if domain.signed_distance(&x) > margin {
            out.push(x);
        }
    }
    out
}

/// Largest `|Δ_h u|` (step `1e-4`) over `count` random points at least 5% of
/// the domain's inradius away from the boundary.
pub fn max_fd_laplacian(
    f: impl Fn(&[f64]) -> Result<f64>,
    domain: &Domain,
    count: usize,
    seed: u64,
) -> Result<f64> {
    let inradius = domain.signed_distance(&domain.center());
    let mut worst: f64 = 0.0;
    for x in random_interior_points(domain, count, 0.05 * inradius, seed) {
        let mut failure = None;
        let lap = fd_laplacian(
            |y| {
                f(y).unwrap_or_else(|e| {
                    failure = Some(e);
                    f64::NAN
                })
            },
            &x,
            1e-4,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        worst = worst.max(lap.abs());
    }
    Ok(worst)
}
