//! σ(f) stays in the convex hull of the graph of f: every point
//! (x, σ(f)(x)) has a Carathéodory witness among graph samples.
//!
//! cargo run --release --example hull_containment

use std::sync::Arc;

use harmavg::oracles::{hull_membership, HullOutcome};
use harmavg::{
    AveragingOperator, BoundaryValues, Domain, GridField, GridSpec, Lattice, QuadratureSpec,
    RadiusSpec,
};

fn main() -> harmavg::Result<()> {
    let disk = Domain::unit_ball(2)?;
    let lattice = Arc::new(Lattice::new(
        disk.clone(),
        GridSpec::tight_uniform(&disk, 65)?,
    )?);
    let op = AveragingOperator::new(
        lattice.clone(),
        RadiusSpec::default(),
        QuadratureSpec::default(),
    )?;
    let f = GridField::from_fn(lattice.clone(), |x| x[0] * x[0] - x[1] * x[1]);
    let sf = op.apply(&f, &BoundaryValues::from_field(&f))?;

    let mask = lattice.mask();
    let graph = |i: usize, v: f64| {
        let a = mask.anchor(i);
        vec![a[0], a[1], v]
    };
    let samples: Vec<Vec<f64>> = mask
        .boundary()
        .iter()
        .chain(mask.interior().iter().step_by(7))
        .map(|&i| graph(i, f.value(i)))
        .collect();
    println!("{} graph samples", samples.len());

    for &node in mask.interior().iter().step_by(600) {
        match hull_membership(&samples, &graph(node, sf.value(node)))? {
            HullOutcome::Inside(w) => {
                println!(
                    "node {node:5}: witness with {} points, residual {:.1e}, weights {:.3?}",
                    w.support.len(),
                    w.residual,
                    w.coefficients
                );
            }
            HullOutcome::Outside(r) => println!(
                "node {node:5}: refused, separating value {:.3e}",
                r.query_value
            ),
        }
    }

    // a point above the graph is refused with a separating hyperplane
    let above = vec![0.0, 0.0, 5.0];
    if let HullOutcome::Outside(r) = hull_membership(&samples, &above)? {
        println!(
            "(0, 0, 5): outside, w = {:.3?}, w·q + b = {:.3}, max over samples {:.1e}",
            r.direction, r.query_value, r.sample_max
        );
    }
    Ok(())
}
