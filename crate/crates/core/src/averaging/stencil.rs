use super::{ball_volume, QuadratureSpec, RadiusSpec, RADIUS_SHRINK};
use crate::error::{Error, Result};
use crate::geometry::{Coords, Lattice, NodeLabel};

/// Quadrature realizing the mean over `B(x, δ_x)` at one interior node.
#[derive(Debug, Clone, PartialEq)]
pub struct BallStencil {
    pub node: usize,
    pub center: Coords,
    /// `δ_x`; the points themselves lie within `δ_x · RADIUS_SHRINK`.
    pub radius: f64,
    pub points: Vec<Coords>,
    pub weights: Vec<f64>,
    /// Volume represented by the kept product cells over the ball volume.
    /// `None` for Monte Carlo rules.
    pub captured_volume_ratio: Option<f64>,
}

impl BallStencil {
    /// Quadrature estimate of the mean of `f` over the ball.
    pub fn mean(&self, f: impl Fn(&[f64]) -> f64, dim: usize) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(&p[..dim]))
            .sum()
    }
}

pub(crate) fn place_template(
    lattice: &Lattice,
    node: usize,
    delta: f64,
    template: &[[f64; 3]],
    weights: &[f64],
    quad: &QuadratureSpec,
) -> Result<BallStencil> {
    let n = lattice.dim();
    if template.len() < 1 << n {
        return Err(Error::UnderResolvedStencil {
            node,
            kept: template.len(),
            needed: 1 << n,
        });
    }
    let center = lattice.grid().node_point(node);
    let r = delta * RADIUS_SHRINK;
    let points = template
        .iter()
        .map(|a| {
            let mut p = [0.0; 3];
            for axis in 0..n {
                p[axis] = center[axis] + r * a[axis];
            }
            p
        })
        .collect();
    let captured_volume_ratio = match *quad {
        QuadratureSpec::ProductMidpoint {
            samples_per_axis: m,
        } => Some(template.len() as f64 * (2.0 / m as f64).powi(n as i32) / ball_volume(n, 1.0)),
        QuadratureSpec::MonteCarlo { .. } => None,
    };
    Ok(BallStencil {
        node,
        center,
        radius: delta,
        points,
        weights: weights.to_vec(),
        captured_volume_ratio,
    })
}

/// Builds the ball quadrature at an interior node.
pub fn build_stencil(
    lattice: &Lattice,
    radius: &RadiusSpec,
    quad: &QuadratureSpec,
    node: usize,
) -> Result<BallStencil> {
    radius.validate()?;
    if node >= lattice.grid().len() || lattice.mask().label(node) != NodeLabel::Interior {
        return Err(Error::NotInterior(node));
    }
    let (template, weights) = quad.unit_ball_rule(lattice.dim())?;
    let delta = radius.delta(lattice.mask().signed_distance(node));
    place_template(lattice, node, delta, &template, &weights, quad)
}
