//! Harmonic polynomials are fixed points of σ up to the discretization
//! error, which shrinks about fourfold when the spacing halves.
//!
//! cargo run --release --example fixed_point_residual

use std::sync::Arc;

use harmavg::oracles::harmonic_poly;
use harmavg::{
    fixed_point_residual, AveragingOperator, BoundaryValues, Domain, GridField, GridSpec, Lattice,
    QuadratureSpec, RadiusSpec,
};

fn main() -> harmavg::Result<()> {
    let disk = Domain::unit_ball(2)?;
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "nodes", "Re z", "Re z^2", "Re z^3"
    );
    let mut previous: Option<Vec<f64>> = None;
    for nodes in [33, 65, 129, 257] {
        let lattice = Arc::new(Lattice::new(
            disk.clone(),
            GridSpec::tight_uniform(&disk, nodes)?,
        )?);
        let op = AveragingOperator::new(
            lattice.clone(),
            RadiusSpec::default(),
            QuadratureSpec::default(),
        )?;
        let residuals: Vec<f64> = (1..=3)
            .map(|k| {
                let u = GridField::from_fn(lattice.clone(), |x| harmonic_poly(k, x));
                fixed_point_residual(&op, &u, &BoundaryValues::from_field(&u))
            })
            .collect::<harmavg::Result<_>>()?;
        print!("{nodes:>6}");
        for r in &residuals {
            print!(" {r:>12.3e}");
        }
        if let Some(p) = &previous {
            print!(
                "   ratios {:.2} {:.2}",
                p[1] / residuals[1],
                p[2] / residuals[2]
            );
        }
        println!();
        previous = Some(residuals);
    }

    let lattice = Arc::new(Lattice::new(
        disk.clone(),
        GridSpec::tight_uniform(&disk, 129)?,
    )?);
    let op = AveragingOperator::new(lattice, RadiusSpec::default(), QuadratureSpec::default())?;
    let node = op.lattice().mask().interior()[4000];
    let d = op.defects(node)?;
    println!("\nstencil defects at node {node}: {d:?}");
    println!(
        "one-step budget for |∇u| <= 3, |D²u| <= 6: {:.3e}",
        d.budget(2, 3.0, 6.0)
    );
    Ok(())
}
