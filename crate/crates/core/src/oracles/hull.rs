use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A convex combination of samples reproducing the query.
#[derive(Debug, Clone, PartialEq)]
pub struct HullWitness {
    pub query: Vec<f64>,
    /// Indices into the sample list; at most `dim + 1` of them.
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// Max-norm error of `Σ α_i s_i − query` and of `Σ α_i − 1`.
    pub residual: f64,
}

/// A hyperplane `w·s + offset ≤ 0` satisfied by every sample and violated by
/// the query, certifying that the query lies outside the hull.
#[derive(Debug, Clone, PartialEq)]
pub struct HullRefusal {
    pub query: Vec<f64>,
    pub direction: Vec<f64>,
    pub offset: f64,
    /// `w·query + offset`, positive.
    pub query_value: f64,
    /// `max_i w·s_i + offset`, nonpositive up to rounding.
    pub sample_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HullOutcome {
    Inside(HullWitness),
    Outside(HullRefusal),
}

impl HullOutcome {
    pub fn witness(&self) -> Option<&HullWitness> {
        match self {
            HullOutcome::Inside(w) => Some(w),
            HullOutcome::Outside(_) => None,
        }
    }
}

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-12;

/// Decides whether `query` lies in the convex hull of `samples`.
///
/// Runs phase one of the revised simplex method with Bland's rule on
/// `Σ α_i (s_i, 1) = (query, 1)`, `α ≥ 0`. A basic feasible solution has at
/// most `dim + 1` nonzero coefficients, which is Carathéodory's bound.
pub fn hull_membership(samples: &[Vec<f64>], query: &[f64]) -> Result<HullOutcome> {
    let m = query.len();
    if samples.is_empty() || samples.iter().any(|s| s.len() != m) {
        return Err(Error::Precondition(format!(
            "hull membership needs samples of dimension {m}"
        )));
    }
    if let Some(k) = samples
        .iter()
        .position(|s| s.iter().zip(query).all(|(a, b)| a == b))
    {
        return Ok(HullOutcome::Inside(HullWitness {
            query: query.to_vec(),
            support: vec![k],
            coefficients: vec![1.0],
            residual: 0.0,
        }));
    }
    let rows = m + 1;
    let n = samples.len();
    let mut b = query.to_vec();
    b.push(1.0);
    let sign: Vec<f64> = b
        .iter()
        .map(|v| if *v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let column = |j: usize| -> DVector<f64> {
        if j < n {
            let mut c = samples[j].clone();
            c.push(1.0);
            DVector::from_vec(c)
        } else {
            let mut c = DVector::zeros(rows);
            c[j - n] = sign[j - n];
            c
        }
    };
    let cost = |j: usize| if j < n { 0.0 } else { 1.0 };
    let rhs = DVector::from_vec(b.clone());

    let mut basis: Vec<usize> = (n..n + rows).collect();
    let max_pivots = 10_000 + 50 * n;
    let mut pivots = 0;
    let (x_b, y) = loop {
        let bmat = DMatrix::from_columns(&basis.iter().map(|&j| column(j)).collect::<Vec<_>>());
        let lu = bmat.clone().lu();
        let mut x_b = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Precondition("singular simplex basis".into()))?;
        for v in x_b.iter_mut() {
            if *v < 0.0 && *v > -1e-13 {
                *v = 0.0;
            }
        }
        let c_b = DVector::from_iterator(rows, basis.iter().map(|&j| cost(j)));
        let y = bmat
            .transpose()
            .lu()
            .solve(&c_b)
            .ok_or_else(|| Error::Precondition("singular simplex basis".into()))?;
        let entering = (0..n + rows)
            .filter(|j| !basis.contains(j))
            .find(|&j| cost(j) - y.dot(&column(j)) < -PRICE_TOL);
        let Some(j) = entering else {
            break (x_b, y);
        };
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Precondition("hull LP did not terminate".into()));
        }
        let d = lu
            .solve(&column(j))
            .ok_or_else(|| Error::Precondition("singular simplex basis".into()))?;
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            if d[i] > PIVOT_TOL {
                let ratio = x_b[i] / d[i];
                leave = match leave {
                    Some((l, best)) if ratio > best + 1e-14 => Some((l, best)),
                    Some((l, best)) if ratio >= best - 1e-14 && basis[l] < basis[i] => {
                        Some((l, best.min(ratio)))
                    }
                    _ => Some((i, ratio)),
                };
            }
        }
        let Some((i, _)) = leave else {
            return Err(Error::Precondition("unbounded phase-one LP".into()));
        };
        basis[i] = j;
    };

    let objective: f64 = basis
        .iter()
        .zip(x_b.iter())
        .filter(|(j, _)| **j >= n)
        .map(|(_, v)| v)
        .sum();
    let scale = 1.0 + b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if objective <= 1e-10 * scale {
        let mut support = Vec::new();
        let mut coefficients = Vec::new();
        for (&j, &v) in basis.iter().zip(x_b.iter()) {
            if j < n && v > 0.0 {
                support.push(j);
                coefficients.push(v);
            }
        }
        let mut combo = vec![0.0; rows];
        for (&j, &a) in support.iter().zip(&coefficients) {
            for (r, c) in combo.iter_mut().zip(column(j).iter()) {
                *r += a * c;
            }
        }
        let residual = combo
            .iter()
            .zip(&b)
            .fold(0.0f64, |acc, (c, t)| acc.max((c - t).abs()));
        return Ok(HullOutcome::Inside(HullWitness {
            query: query.to_vec(),
            support,
            coefficients,
            residual,
        }));
    }
    let sample_max = (0..n)
        .map(|j| y.dot(&column(j)))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(HullOutcome::Outside(HullRefusal {
        query: query.to_vec(),
        direction: y.iter().take(m).copied().collect(),
        offset: y[m],
        query_value: y.dot(&rhs),
        sample_max,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn convex_curve(k: usize) -> Vec<Vec<f64>> {
        (0..k)
            .map(|i| {
                let x = i as f64 / (k - 1) as f64;
                vec![x, x * x]
            })
            .collect()
    }

    #[test]
    fn sample_points_get_indicator_witnesses() {
        let s = convex_curve(6);
        let w = hull_membership(&s, &s[3]).unwrap();
        let w = w.witness().unwrap();
        assert_eq!(
            (w.support.as_slice(), w.coefficients.as_slice()),
            (&[3][..], &[1.0][..])
        );
    }

    #[test]
    fn midpoints_of_hull_edges_split_evenly() {
        let s = convex_curve(6);
        let q: Vec<f64> = s[2].iter().zip(&s[3]).map(|(a, b)| 0.5 * (a + b)).collect();
        let out = hull_membership(&s, &q).unwrap();
        let w = out.witness().unwrap();
        let mut pairs: Vec<(usize, f64)> = w
            .support
            .iter()
            .copied()
            .zip(w.coefficients.iter().copied())
            .collect();
        pairs.sort_by_key(|p| p.0);
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].0, pairs[1].0), (2, 3));
        assert!((pairs[0].1 - 0.5).abs() < 1e-12 && (pairs[1].1 - 0.5).abs() < 1e-12);
        assert!(w.residual <= 1e-12);
    }

    #[test]
    fn points_outside_get_a_separating_hyperplane() {
        let s = convex_curve(6);
        let out = hull_membership(&s, &[0.5, 0.1]).unwrap();
        let HullOutcome::Outside(r) = out else {
            panic!("expected a refusal")
        };
        assert!(r.query_value > 0.0);
        assert!(r.sample_max <= 1e-12);
    }

    #[test]
    fn witnesses_respect_caratheodory() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let s: Vec<Vec<f64>> = (0..300)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        for _ in 0..20 {
            let q: Vec<f64> = (0..3).map(|_| rng.random_range(-0.3..0.3)).collect();
            let out = hull_membership(&s, &q).unwrap();
            let w = out
                .witness()
                .expect("small cube around the origin is inside");
            assert!(w.support.len() <= 4);
            assert!(w.coefficients.iter().all(|a| *a >= 0.0));
            assert!(w.residual <= 1e-10);
        }
    }
}
