//! Invariants over random inputs.

use std::sync::Arc;

use harmavg::field::csv::{read_csv, to_csv_string};
use harmavg::oracles::hull_membership;
use harmavg::{
    AveragingOperator, BoundaryValues, Convexity, Domain, GridField, GridSpec, Lattice,
    QuadratureSpec, RadiusSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn operator(domain: Domain, nodes: usize, c: f64) -> AveragingOperator {
    let grid = GridSpec::tight_uniform(&domain, nodes).unwrap();
    let lat = Arc::new(Lattice::new(domain, grid).unwrap());
    AveragingOperator::new(
        lat,
        RadiusSpec::fraction(c).unwrap(),
        QuadratureSpec::default(),
    )
    .unwrap()
}

fn random_field(lat: &Arc<Lattice>, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..lat.grid().len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    GridField::from_values(lat.clone(), values).unwrap()
}

fn domains() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (0.3f64..2.0).prop_map(|r| Domain::ball(&[0.1, -0.2], r).unwrap()),
        (0.3f64..2.0, 0.3f64..2.0).prop_map(|(a, b)| Domain::ellipse([0.0, 0.0], [a, b]).unwrap()),
        (2.5f64..8.0).prop_map(|p| Domain::superellipse([0.0, 0.0], [1.0, 0.7], p).unwrap()),
        (0.3f64..2.0, 0.3f64..2.0).prop_map(|(a, b)| Domain::cuboid(&[0.0, 0.0], &[a, b]).unwrap()),
        (0.5f64..1.5).prop_map(|r| Domain::ball(&[0.0, 0.0, 0.0], r).unwrap()),
        (-1.0f64..0.0, 0.1f64..2.0).prop_map(|(lo, w)| Domain::interval(lo, lo + w).unwrap()),
    ]
}

fn point_near(domain: &Domain, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (lo, hi) = domain.bounding_box();
    lo.iter()
        .zip(&hi)
        .map(|(l, h)| {
            let pad = 0.25 * (h - l);
            rng.random_range(l - pad..h + pad)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn averaging_obeys_the_maximum_principle(seed in any::<u64>(), c in 0.1f64..1.0) {
        let op = operator(Domain::unit_ball(2).unwrap(), 21, c);
        let f = random_field(op.lattice(), seed);
        let sf = op.apply(&f, &BoundaryValues::from_field(&f)).unwrap();
        prop_assert!(sf.sup_norm() <= f.sup_norm() + 1e-12);
        let ((lo, hi), (slo, shi)) = (f.range(), sf.range());
        prop_assert!(slo >= lo - 1e-12 && shi <= hi + 1e-12);
    }

    #[test]
    fn averaging_is_nonexpansive_and_monotone(seed in any::<u64>(), dim in 1usize..=3) {
        let domain = Domain::unit_ball(dim).unwrap();
        let op = operator(domain, if dim == 3 { 9 } else { 21 }, 0.5);
        let f = random_field(op.lattice(), seed);
        let g = random_field(op.lattice(), seed.wrapping_add(1));
        let (sf, sg) = (
            op.apply(&f, &BoundaryValues::from_field(&f)).unwrap(),
            op.apply(&g, &BoundaryValues::from_field(&g)).unwrap(),
        );
        prop_assert!(sf.sup_diff(&sg).unwrap() <= f.sup_diff(&g).unwrap() + 1e-12);

        let above = f.map(|v| v + 0.5 + v.abs());
        let sa = op.apply(&above, &BoundaryValues::from_field(&above)).unwrap();
        for i in f.active_nodes() {
            prop_assert!(sa.value(i) >= sf.value(i) - 1e-12);
        }
    }

    #[test]
    fn constants_are_fixed(k in -10.0f64..10.0) {
        let op = operator(Domain::ellipse([0.0, 0.0], [1.0, 0.5]).unwrap(), 17, 0.5);
        let f = GridField::constant(op.lattice().clone(), k);
        let sf = op.apply(&f, &BoundaryValues::from_field(&f)).unwrap();
        prop_assert!(sf.sup_diff(&f).unwrap() <= 1e-13 * (1.0 + k.abs()));
    }

    #[test]
    fn signed_distance_is_1_lipschitz(domain in domains(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (x, y) = (point_near(&domain, &mut rng), point_near(&domain, &mut rng));
            let d: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let gap = (domain.signed_distance(&x) - domain.signed_distance(&y)).abs();
            prop_assert!(gap <= d * (1.0 + 1e-9) + 1e-12, "gap {} > distance {}", gap, d);
        }
    }

    #[test]
    fn strongly_convex_domains_swallow_chords(domain in domains(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let strict = domain.convexity() == Convexity::StronglyConvex;
        for _ in 0..20 {
            let p = domain.project_to_boundary(&point_near(&domain, &mut rng));
            let q = domain.project_to_boundary(&point_near(&domain, &mut rng));
            let t = rng.random_range(0.1..0.9);
            let m: Vec<f64> = p.iter().zip(&q).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            let sd = domain.signed_distance(&m);
            prop_assert!(sd > -1e-9);
            let chord: f64 = p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if strict && chord > 1e-3 {
                prop_assert!(sd > 0.0, "chord point {:?} not interior", m);
            }
        }
    }

    #[test]
    fn hull_matches_brute_force_on_interval_graphs(
        xs in prop::collection::vec(0.0f64..1.0, 1..=12),
        qx in 0.0f64..1.0,
        qt in -1.5f64..1.5,
        freq in 1.0f64..6.0,
    ) {
        let samples: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, (freq * x).sin()]).collect();
        let q = [qx, qt];
        // best barycentric slack over all segments and triangles
        let mut best = f64::NEG_INFINITY;
        let n = samples.len();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let (a, b, c) = (&samples[i], &samples[j], &samples[k]);
                    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let l1 = ((b[0] - q[0]) * (c[1] - q[1]) - (c[0] - q[0]) * (b[1] - q[1])) / det;
                    let l2 = ((c[0] - q[0]) * (a[1] - q[1]) - (a[0] - q[0]) * (c[1] - q[1])) / det;
                    best = best.max(l1.min(l2).min(1.0 - l1 - l2));
                }
            }
        }
        prop_assume!(best.abs() > 1e-9);
        let outcome = hull_membership(&samples, &q).unwrap();
        prop_assert_eq!(outcome.witness().is_some(), best > 0.0);
        if let Some(w) = outcome.witness() {
            prop_assert!(w.residual <= 1e-9);
            prop_assert!(w.support.len() <= 3);
            prop_assert!(w.coefficients.iter().all(|&a| a >= 0.0));
        }
    }

    #[test]
    fn csv_round_trip_is_exact(seed in any::<u64>(), nodes in 3usize..20) {
        let domain = Domain::ellipse([0.0, 0.0], [1.0, 0.6]).unwrap();
        let lat = Arc::new(Lattice::new(domain.clone(), GridSpec::tight_uniform(&domain, nodes).unwrap()).unwrap());
        let f = random_field(&lat, seed).map(|v| v * 1e3);
        let back = read_csv(lat.clone(), &to_csv_string(&f)).unwrap();
        for i in f.active_nodes() {
            prop_assert_eq!(f.value(i).to_bits(), back.value(i).to_bits());
        }
    }
}

#[test]
fn box_midpoints_can_sit_on_the_boundary() {
    let square = Domain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    assert_eq!(square.convexity(), Convexity::ConvexOnly);
    assert_eq!(square.signed_distance(&[0.5, 0.0]), 0.0);
    assert_eq!(square.signed_distance(&[0.5, 0.5]), 0.5);
    assert_eq!(
        Domain::unit_ball(2).unwrap().convexity(),
        Convexity::StronglyConvex
    );
}
