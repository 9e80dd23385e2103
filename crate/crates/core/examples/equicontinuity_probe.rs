//! Empirical constants in |σf(x) − σf(y)| <= C ‖f‖ (|δx − δy| + |x − y|) / δx
//! over adjacent node pairs, for a few fields and radius fractions.
//!
//! cargo run --release --example equicontinuity_probe

use std::sync::Arc;

use harmavg::{
    AveragingOperator, BoundaryValues, Domain, GridField, GridSpec, Lattice, QuadratureSpec,
    RadiusSpec,
};

type Probe = (&'static str, fn(&[f64]) -> f64);

fn main() -> harmavg::Result<()> {
    let disk = Domain::unit_ball(2)?;
    let lattice = Arc::new(Lattice::new(
        disk.clone(),
        GridSpec::tight_uniform(&disk, 129)?,
    )?);
    let fields: [Probe; 4] = [
        ("x^2 - y^2", |x| x[0] * x[0] - x[1] * x[1]),
        ("x^3 - 3xy^2", |x| x[0].powi(3) - 3.0 * x[0] * x[1] * x[1]),
        ("e^x cos y", |x| x[0].exp() * x[1].cos()),
        ("sign(x)", |x| x[0].signum()),
    ];
    for c in [0.25, 0.5, 0.9] {
        let op = AveragingOperator::new(
            lattice.clone(),
            RadiusSpec::fraction(c)?,
            QuadratureSpec::default(),
        )?;
        let pairs = op.adjacent_pairs(500, 0);
        print!("c = {c:4}:");
        for (name, g) in &fields {
            let f = GridField::from_fn(lattice.clone(), g);
            let ratios = op.lipschitz_probe(&f, &BoundaryValues::from_field(&f), &pairs)?;
            print!(
                "  {name}: {:.4}",
                ratios.iter().copied().fold(0.0, f64::max)
            );
        }
        println!();
    }
    Ok(())
}
