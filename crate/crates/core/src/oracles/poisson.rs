use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::BoundaryData;
use crate::geometry::Domain;

/// Trapezoid nodes on the circle.
pub const POISSON_NODES: usize = 4096;

/// Inside this radius (in disk units) the trapezoid rule is evaluated through
/// its Fourier form.
const FOURIER_RADIUS: f64 = 0.95;

/// Harmonic extension of boundary data into a disk by the Poisson integral.
///
/// The data is sampled once at `POISSON_NODES` equally spaced angles and the
/// integral approximated by the trapezoid rule. Away from the circle the rule
/// equals `Re Σ c_k ζ^k` with `ζ = x₁ + i·x₂` and discrete Fourier
/// coefficients `c_k`, a polynomial that is evaluated smoothly by Horner's
/// scheme. Near the circle the kernel sum is used, with the value at the
/// point's own boundary angle subtracted first.
#[derive(Debug, Clone)]
pub struct PoissonDisk {
    domain: Domain,
    center: [f64; 2],
    radius: f64,
    data: BoundaryData,
    cos: Vec<f64>,
    sin: Vec<f64>,
    samples: Vec<f64>,
    /// `c_0 = ĝ_0`, `c_k = 2ĝ_k` as `(re, im)`.
    coefficients: Vec<(f64, f64)>,
}

impl PoissonDisk {
    pub fn new(domain: &Domain, data: BoundaryData) -> Result<Self> {
        let Some((center, radius)) = domain.as_ball().filter(|(c, _)| c.len() == 2) else {
            return Err(Error::Unsupported(
                "the Poisson integral oracle needs a disk".into(),
            ));
        };
        data.validate(domain)?;
        let angles: Vec<f64> = (0..POISSON_NODES)
            .map(|j| TAU * j as f64 / POISSON_NODES as f64)
            .collect();
        let cos: Vec<f64> = angles.iter().map(|t| t.cos()).collect();
        let sin: Vec<f64> = angles.iter().map(|t| t.sin()).collect();
        let samples: Vec<f64> = (0..POISSON_NODES)
            .map(|j| {
                data.value_at(
                    domain,
                    &[center[0] + radius * cos[j], center[1] + radius * sin[j]],
                )
            })
            .collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "boundary data is not finite on the circle".into(),
            ));
        }
        let coefficients = (0..POISSON_NODES / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, g) in samples.iter().enumerate() {
                    let idx = (k * j) % POISSON_NODES;
                    re += g * cos[idx];
                    im -= g * sin[idx];
                }
                let scale = if k == 0 { 1.0 } else { 2.0 } / POISSON_NODES as f64;
                (scale * re, scale * im)
            })
            .collect();
        Ok(PoissonDisk {
            coefficients,
            domain: domain.clone(),
            center: [center[0], center[1]],
            radius,
            data,
            cos,
            sin,
            samples,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    /// Value at `x`; fails within `1e-12` (relative) of the circle, where the
    /// boundary data should be used directly.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let xi = [
            (x[0] - self.center[0]) / self.radius,
            (x[1] - self.center[1]) / self.radius,
        ];
        let r = xi[0].hypot(xi[1]);
        if r >= 1.0 - 1e-12 {
            return Err(Error::Precondition(format!(
                "Poisson integral needs |x| < 1 - 1e-12 in disk units, got {r}"
            )));
        }
        if r <= FOURIER_RADIUS {
            let (mut re, mut im) = (0.0, 0.0);
            for &(cr, ci) in self.coefficients.iter().rev() {
                (re, im) = (re * xi[0] - im * xi[1] + cr, re * xi[1] + im * xi[0] + ci);
            }
            return Ok(re);
        }
        let (cx, sx, gx) = if r > 0.0 {
            let (c, s) = (xi[0] / r, xi[1] / r);
            let g = self.data.value_at(
                &self.domain,
                &[
                    self.center[0] + self.radius * c,
                    self.center[1] + self.radius * s,
                ],
            );
            (c, s, g)
        } else {
            (1.0, 0.0, 0.0)
        };
        let one_minus = (1.0 - r) * (1.0 + r);
        let mut acc = 0.0;
        for j in 0..POISSON_NODES {
            let cos_diff = self.cos[j] * cx + self.sin[j] * sx;
            let kernel = one_minus / (1.0 - 2.0 * r * cos_diff + r * r);
            acc += kernel * (self.samples[j] - gx);
        }
        Ok(gx + acc / POISSON_NODES as f64)
    }
}

/// Poisson integral of `data` on the unit disk at `x`.
pub fn poisson_solution(data: &BoundaryData, x: &[f64]) -> Result<f64> {
    PoissonDisk::new(&Domain::unit_ball(2)?, data.clone())?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{harmonic_poly, random_interior_points};

    #[test]
    fn poisson_examples() {
        let c = BoundaryData::expression("1.5").unwrap();
        assert!((poisson_solution(&c, &[0.3, 0.4]).unwrap() - 1.5).abs() < 1e-13);
        let cos2 = BoundaryData::expression("cos(2*theta)").unwrap();
        assert!(poisson_solution(&cos2, &[0.0, 0.0]).unwrap().abs() < 1e-14);
        let r: f64 = 0.6;
        assert!((poisson_solution(&cos2, &[r, 0.0]).unwrap() - r * r).abs() < 1e-12);
        assert!(poisson_solution(&cos2, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn matches_harmonic_polynomials() {
        let disk = Domain::unit_ball(2).unwrap();
        for k in 0..=4u32 {
            let data = BoundaryData::expression(&format!("cos({k}*theta)")).unwrap();
            let p = PoissonDisk::new(&disk, data).unwrap();
            for x in random_interior_points(&disk, 50, 0.05, 40 + k as u64) {
                assert!((p.eval(&x).unwrap() - harmonic_poly(k, &x)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn both_evaluations_agree_across_the_switch() {
        let disk = Domain::unit_ball(2).unwrap();
        let data = BoundaryData::expression("abs(cos(theta))").unwrap();
        let p = PoissonDisk::new(&disk, data).unwrap();
        for t in [0.1f64, 1.0, 2.5] {
            let inner = p.eval(&[0.95 * t.cos(), 0.95 * t.sin()]).unwrap();
            let outer = p.eval(&[0.950001 * t.cos(), 0.950001 * t.sin()]).unwrap();
            assert!((inner - outer).abs() < 1e-5, "{inner} vs {outer}");
        }
    }

    #[test]
    fn shifted_disks_scale_correctly() {
        let d = Domain::ball(&[1.0, -2.0], 2.0).unwrap();
        let data =
            BoundaryData::function(|x| (x[0] - 1.0) * (x[0] - 1.0) - (x[1] + 2.0) * (x[1] + 2.0));
        let p = PoissonDisk::new(&d, data).unwrap();
        let x = [1.5, -1.2];
        let exact = 0.5f64.powi(2) - 0.8f64.powi(2);
        assert!((p.eval(&x).unwrap() - exact).abs() < 1e-10);
    }
}
