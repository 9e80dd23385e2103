//! The averaging operator σ: replace a field by its mean over `B(x, δ(x))`
//! at every interior node, keep boundary values.

mod operator;
mod stencil;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use operator::{AveragingOperator, StencilDefects};
pub use stencil::{build_stencil, BallStencil};

/// Stencil radii are `δ(x)` times this factor, so every quadrature point
/// lies strictly inside the domain.
pub const RADIUS_SHRINK: f64 = 1.0 - 1e-9;

/// Volume of the `n`-dimensional ball of radius `r`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let unit = match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("ball_volume: dimension {n} not in 1..=3"),
    };
    unit * r.powi(n as i32)
}

/// Admissible radius function `δ(x)` in terms of the distance `ρ(x)` to the
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusSpec {
    /// `δ = c·ρ`.
    DistanceFraction { c: f64 },
    /// `δ = min(c·ρ, cap)`.
    CappedFraction { c: f64, cap: f64 },
}

impl RadiusSpec {
    pub fn fraction(c: f64) -> Result<Self> {
        let r = RadiusSpec::DistanceFraction { c };
        r.validate()?;
        Ok(r)
    }

    pub fn capped(c: f64, cap: f64) -> Result<Self> {
        let r = RadiusSpec::CappedFraction { c, cap };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.fraction_c();
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidRadius(format!(
                "fraction c must lie in (0, 1], got {c}"
            )));
        }
        if let RadiusSpec::CappedFraction { cap, .. } = *self {
            if !(cap.is_finite() && cap > 0.0) {
                return Err(Error::InvalidRadius(format!(
                    "cap must be positive and finite, got {cap}"
                )));
            }
        }
        Ok(())
    }

    pub fn fraction_c(&self) -> f64 {
        match *self {
            RadiusSpec::DistanceFraction { c } | RadiusSpec::CappedFraction { c, .. } => c,
        }
    }

    /// `δ` at a point at distance `rho` from the boundary; zero on and
    /// outside the boundary.
    pub fn delta(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        match *self {
            RadiusSpec::DistanceFraction { c } => c * rho,
            RadiusSpec::CappedFraction { c, cap } => (c * rho).min(cap),
        }
    }
}

impl Default for RadiusSpec {
    fn default() -> Self {
        RadiusSpec::DistanceFraction { c: 0.5 }
    }
}

/// How the ball mean is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadratureSpec {
    /// Midpoints of an `m^n` grid over the ball's bounding box, keeping the
    /// ones inside the ball.
    ProductMidpoint { samples_per_axis: usize },
    /// Uniform points in the ball by rejection sampling.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::ProductMidpoint {
            samples_per_axis: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            QuadratureSpec::ProductMidpoint { samples_per_axis } if samples_per_axis < 2 => {
                Err(Error::InvalidQuadrature(format!(
                    "need at least 2 samples per axis, got {samples_per_axis}"
                )))
            }
            QuadratureSpec::MonteCarlo { samples, .. } if samples < 100 => {
                Err(Error::InvalidQuadrature(format!(
                    "need at least 100 Monte Carlo samples, got {samples}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Quadrature points for the open unit ball in dimension `n`, with
    /// nonnegative weights summing to one.
    ///
    /// Every stencil is this template scaled by its radius and moved to its
    /// node; the Monte Carlo template is drawn once from the seed and shared.
    pub fn unit_ball_rule(&self, n: usize) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
        self.validate()?;
        let points = match *self {
            QuadratureSpec::ProductMidpoint {
                samples_per_axis: m,
            } => {
                let mid = |i: usize| -1.0 + (2 * i + 1) as f64 / m as f64;
                let mut pts = Vec::new();
                for code in 0..m.pow(n as u32) {
                    let mut rem = code;
                    let mut a = [0.0; 3];
                    for v in a.iter_mut().take(n) {
                        *v = mid(rem % m);
                        rem /= m;
                    }
                    if a.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                        pts.push(a);
                    }
                }
                pts
            }
            QuadratureSpec::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut pts = Vec::with_capacity(samples);
                while pts.len() < samples {
                    let mut a = [0.0; 3];
                    for v in a.iter_mut().take(n) {
                        *v = rng.random_range(-1.0..1.0);
                    }
                    if a.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                        pts.push(a);
                    }
                }
                pts
            }
        };
        Ok((points.clone(), uniform_weights(points.len())))
    }
}

/// `k` equal weights whose floating-point sum is one to within an ulp or so.
pub(crate) fn uniform_weights(k: usize) -> Vec<f64> {
    let mut w = vec![1.0 / k as f64; k];
    if k > 1 {
        let head: f64 = w[..k - 1].iter().sum();
        w[k - 1] = 1.0 - head;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volume_examples() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-15);
        assert_eq!(ball_volume(1, 0.5), 1.0);
        assert!((ball_volume(3, 2.0) - 32.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn radius_validation() {
        assert!(RadiusSpec::fraction(-0.5).is_err());
        assert!(RadiusSpec::fraction(0.0).is_err());
        assert!(RadiusSpec::fraction(1.5).is_err());
        assert!(RadiusSpec::capped(0.5, 0.0).is_err());
        let r = RadiusSpec::capped(0.5, 0.1).unwrap();
        assert_eq!(r.delta(0.1), 0.05);
        assert_eq!(r.delta(0.8), 0.1);
        assert_eq!(r.delta(-0.1), 0.0);
    }

    #[test]
    fn unit_ball_rules() {
        let (pts, w) = QuadratureSpec::default().unit_ball_rule(2).unwrap();
        assert!(pts.iter().all(|p| p[0] * p[0] + p[1] * p[1] < 1.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
        // Midpoints of a 16x16 grid that fall in the unit disk.
        let direct = (0..256)
            .filter(|c| {
                let (i, j) = (c % 16, c / 16);
                let (x, y) = (
                    -1.0 + (2 * i + 1) as f64 / 16.0,
                    -1.0 + (2 * j + 1) as f64 / 16.0,
                );
                x * x + y * y < 1.0
            })
            .count();
        assert_eq!(pts.len(), direct);

        let (pts, _) = QuadratureSpec::ProductMidpoint {
            samples_per_axis: 16,
        }
        .unit_ball_rule(1)
        .unwrap();
        assert_eq!(pts.len(), 16);

        let mc = QuadratureSpec::MonteCarlo {
            samples: 500,
            seed: 3,
        };
        let (a, _) = mc.unit_ball_rule(3).unwrap();
        let (b, _) = mc.unit_ball_rule(3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
        assert!(QuadratureSpec::MonteCarlo {
            samples: 99,
            seed: 0
        }
        .validate()
        .is_err());
        assert!(QuadratureSpec::ProductMidpoint {
            samples_per_axis: 1
        }
        .validate()
        .is_err());
    }
}
