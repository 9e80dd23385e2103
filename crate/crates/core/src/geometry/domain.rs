use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration cap for the bracketed 1-D solves behind ellipse and superellipse distances.
const DISTANCE_SOLVE_MAX_ITER: usize = 100;
/// Polar samples per quadrant used to bracket superellipse nearest points.
const SUPERELLIPSE_SAMPLES: usize = 256;

/// The closed-form shape families a [`Domain`] can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Ball,
    Ellipse,
    Superellipse,
    Box,
}

/// Convexity class of a domain.
///
/// A domain is strongly convex when every nontrivial convex combination of
/// points of its closure lies in the open domain. Disks are, squares are not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    StronglyConvex,
    ConvexOnly,
    Nonconvex,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Interval {
        lo: f64,
        hi: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
    },
    Superellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        exponent: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

/// A bounded open domain in dimension 1, 2 or 3, given in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    shape: Shape,
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!(
            "dimension must be 1, 2 or 3, got {n}"
        )))
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!(
            "{what} must be positive and finite, got {v}"
        )))
    }
}

fn check_finite(what: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{what} must be finite")))
    }
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_finite("interval ends", &[lo, hi])?;
        check_positive("interval length", hi - lo)?;
        Ok(Domain {
            shape: Shape::Interval { lo, hi },
        })
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        check_finite("center", center)?;
        check_positive("radius", radius)?;
        Ok(Domain {
            shape: Shape::Ball {
                center: center.to_vec(),
                radius,
            },
        })
    }

    /// The unit ball centered at the origin.
    pub fn unit_ball(n: usize) -> Result<Self> {
        Self::ball(&vec![0.0; n], 1.0)
    }

    pub fn ellipse(center: [f64; 2], semi_axes: [f64; 2]) -> Result<Self> {
        check_finite("center", &center)?;
        check_positive("semi-axis", semi_axes[0])?;
        check_positive("semi-axis", semi_axes[1])?;
        Ok(Domain {
            shape: Shape::Ellipse { center, semi_axes },
        })
    }

    /// `|x/a|^p + |y/b|^p < 1` with `p >= 2`; `p = 2` is returned as an ellipse.
    pub fn superellipse(center: [f64; 2], semi_axes: [f64; 2], exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 2.0) {
            return Err(Error::InvalidDomain(format!(
                "superellipse exponent must be >= 2, got {exponent}"
            )));
        }
        if exponent == 2.0 {
            return Self::ellipse(center, semi_axes);
        }
        check_finite("center", &center)?;
        check_positive("semi-axis", semi_axes[0])?;
        check_positive("semi-axis", semi_axes[1])?;
        Ok(Domain {
            shape: Shape::Superellipse {
                center,
                semi_axes,
                exponent,
            },
        })
    }

    /// Axis-aligned box `lo < x < hi`. A one-dimensional box is an interval.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len())?;
        if lo.len() != hi.len() {
            return Err(Error::InvalidDomain(
                "box corners differ in dimension".into(),
            ));
        }
        check_finite("box corner", lo)?;
        check_finite("box corner", hi)?;
        for (l, h) in lo.iter().zip(hi) {
            check_positive("box width", h - l)?;
        }
        if lo.len() == 1 {
            return Self::interval(lo[0], hi[0]);
        }
        Ok(Domain {
            shape: Shape::Box {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            },
        })
    }

    pub fn kind(&self) -> DomainKind {
        match self.shape {
            Shape::Interval { .. } => DomainKind::Interval,
            Shape::Ball { .. } => DomainKind::Ball,
            Shape::Ellipse { .. } => DomainKind::Ellipse,
            Shape::Superellipse { .. } => DomainKind::Superellipse,
            Shape::Box { .. } => DomainKind::Box,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Interval { .. } => 1,
            Shape::Ball { center, .. } => center.len(),
            Shape::Ellipse { .. } | Shape::Superellipse { .. } => 2,
            Shape::Box { lo, .. } => lo.len(),
        }
    }

    /// Center of symmetry; boundary angles are measured around it.
    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Interval { lo, hi } => vec![0.5 * (lo + hi)],
            Shape::Ball { center, .. } => center.clone(),
            Shape::Ellipse { center, .. } | Shape::Superellipse { center, .. } => center.to_vec(),
            Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
        }
    }

    /// `(center, radius)` when the domain is a ball (intervals included).
    pub fn as_ball(&self) -> Option<(Vec<f64>, f64)> {
        match &self.shape {
            Shape::Interval { lo, hi } => Some((vec![0.5 * (lo + hi)], 0.5 * (hi - lo))),
            Shape::Ball { center, radius } => Some((center.clone(), *radius)),
            _ => None,
        }
    }

    /// Tight axis-aligned bounding box of the closure, as `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Ellipse { center, semi_axes }
            | Shape::Superellipse {
                center, semi_axes, ..
            } => (
                vec![center[0] - semi_axes[0], center[1] - semi_axes[1]],
                vec![center[0] + semi_axes[0], center[1] + semi_axes[1]],
            ),
            Shape::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    pub fn convexity(&self) -> Convexity {
        match self.shape {
            Shape::Box { .. } => Convexity::ConvexOnly,
            _ => Convexity::StronglyConvex,
        }
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    ///
    /// Exact for intervals, balls and boxes. Ellipses and superellipses take
    /// the sign from the implicit equation and the magnitude from a bracketed
    /// nearest-point solve.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match &self.shape {
            Shape::Interval { lo, hi } => (x[0] - lo).min(hi - x[0]),
            Shape::Ball { center, radius } => radius - dist(x, center),
            Shape::Box { lo, hi } => {
                let mut inside = f64::INFINITY;
                let mut outside_sq = 0.0;
                let mut is_outside = false;
                for i in 0..lo.len() {
                    let q = (lo[i] - x[i]).max(x[i] - hi[i]);
                    if q > 0.0 {
                        is_outside = true;
                        outside_sq += q * q;
                    }
                    inside = inside.min(-q);
                }
                if is_outside {
                    -outside_sq.sqrt()
                } else {
                    inside
                }
            }
            Shape::Ellipse { center, semi_axes } => {
                let y = [x[0] - center[0], x[1] - center[1]];
                let g = (y[0] / semi_axes[0]).powi(2) + (y[1] / semi_axes[1]).powi(2) - 1.0;
                let d = ellipse_distance(*semi_axes, [y[0].abs(), y[1].abs()]);
                if g > 0.0 {
                    -d
                } else {
                    d
                }
            }
            Shape::Superellipse {
                center,
                semi_axes,
                exponent,
            } => {
                let y = [(x[0] - center[0]).abs(), (x[1] - center[1]).abs()];
                let g = (y[0] / semi_axes[0]).powf(*exponent)
                    + (y[1] / semi_axes[1]).powf(*exponent)
                    - 1.0;
                let d = superellipse_distance(*semi_axes, *exponent, y);
                if g > 0.0 {
                    -d
                } else {
                    d
                }
            }
        }
    }

    /// Whether the closed ball `B(center, radius)` lies in the open domain.
    ///
    /// Touching the boundary counts as not contained; the comparison carries a
    /// relative tolerance of `1e-12`.
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        let sd = self.signed_distance(center);
        sd > 0.0 && radius >= 0.0 && radius <= sd * (1.0 - 1e-12)
    }

    /// Maps a point to the boundary: along the ray from the center for
    /// balls, ellipses and superellipses, to the nearest face for boxes.
    pub fn project_to_boundary(&self, x: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Interval { lo, hi } => {
                if (x[0] - lo).abs() <= (hi - x[0]).abs() {
                    vec![*lo]
                } else {
                    vec![*hi]
                }
            }
            Shape::Box { lo, hi } => {
                let clamped: Vec<f64> = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect();
                if clamped.as_slice() != x {
                    return clamped;
                }
                // Inside or on the closure: move to the nearest face.
                let mut best = (f64::INFINITY, 0, 0.0);
                for i in 0..lo.len() {
                    for face in [lo[i], hi[i]] {
                        let d = (x[i] - face).abs();
                        if d < best.0 {
                            best = (d, i, face);
                        }
                    }
                }
                let mut p = x.to_vec();
                p[best.1] = best.2;
                p
            }
            _ => {
                let c = self.center();
                let mut d: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
                if d.iter().all(|v| *v == 0.0) {
                    d[0] = 1.0;
                }
                let scale = match &self.shape {
                    Shape::Ball { radius, .. } => radius / norm(&d),
                    Shape::Ellipse { semi_axes, .. } => {
                        1.0 / ((d[0] / semi_axes[0]).powi(2) + (d[1] / semi_axes[1]).powi(2)).sqrt()
                    }
                    Shape::Superellipse {
                        semi_axes,
                        exponent,
                        ..
                    } => ((d[0] / semi_axes[0]).abs().powf(*exponent)
                        + (d[1] / semi_axes[1]).abs().powf(*exponent))
                    .powf(-1.0 / exponent),
                    _ => unreachable!(),
                };
                c.iter().zip(&d).map(|(ci, di)| ci + scale * di).collect()
            }
        }
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Unsigned distance from a first-quadrant point `y` to the ellipse with the
/// given semi-axes. Reduces to a monotone scalar root that is bisected.
fn ellipse_distance(semi_axes: [f64; 2], y: [f64; 2]) -> f64 {
    // Work with e0 >= e1.
    let (e0, e1, y0, y1) = if semi_axes[0] >= semi_axes[1] {
        (semi_axes[0], semi_axes[1], y[0], y[1])
    } else {
        (semi_axes[1], semi_axes[0], y[1], y[0])
    };
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g == 0.0 {
                return 0.0;
            }
            let r0 = (e0 / e1) * (e0 / e1);
            let s = ellipse_root(r0, z0, z1, g);
            let x0 = r0 * y0 / (s + r0);
            let x1 = y1 / (s + 1.0);
            (x0 - y0).hypot(x1 - y1)
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - e0).abs()
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..DISTANCE_SOLVE_MAX_ITER {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

/// Unsigned distance from a first-quadrant point to a superellipse.
///
/// The boundary is parameterized by polar angle; every local minimum of the
/// sampled squared distance is refined by golden-section search inside its
/// bracket, and the smallest refined value wins.
fn superellipse_distance(semi_axes: [f64; 2], p: f64, y: [f64; 2]) -> f64 {
    let [a, b] = semi_axes;
    let point = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let r = ((c / a).abs().powf(p) + (s / b).abs().powf(p)).powf(-1.0 / p);
        [r * c, r * s]
    };
    let d2 = |phi: f64| {
        let q = point(phi);
        (q[0] - y[0]).powi(2) + (q[1] - y[1]).powi(2)
    };
    let n = SUPERELLIPSE_SAMPLES;
    let step = std::f64::consts::FRAC_PI_2 / n as f64;
    let samples: Vec<f64> = (0..=n).map(|i| d2(i as f64 * step)).collect();
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let left = if i == 0 {
            f64::INFINITY
        } else {
            samples[i - 1]
        };
        let right = if i == n {
            f64::INFINITY
        } else {
            samples[i + 1]
        };
        if samples[i] <= left && samples[i] <= right {
            let lo = (i.saturating_sub(1)) as f64 * step;
            let hi = ((i + 1).min(n)) as f64 * step;
            best = best.min(golden_min(&d2, lo, hi)).min(samples[i]);
        }
    }
    best.sqrt()
}

fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..DISTANCE_SOLVE_MAX_ITER {
        if hi - lo <= 1e-15 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}
