//! Boundary data |cos θ| on the unit disk, iterated from zero and compared
//! with the Poisson integral of the same data.
//!
//! cargo run --release --example disk_dirichlet

use std::sync::Arc;

use harmavg::iteration::run_observed;
use harmavg::{
    AveragingOperator, BoundaryData, BoundaryValues, Domain, GridField, GridSpec, Lattice,
    Monitors, OracleSolution, PoissonDisk, QuadratureSpec, RadiusSpec, StopRule,
};

fn main() -> harmavg::Result<()> {
    let disk = Domain::unit_ball(2)?;
    let lattice = Arc::new(Lattice::new(
        disk.clone(),
        GridSpec::tight_uniform(&disk, 65)?,
    )?);
    let data = BoundaryData::expression("abs(cos(theta))")?;
    let boundary = BoundaryValues::sample(&lattice, &data)?;
    let op = AveragingOperator::new(
        lattice.clone(),
        RadiusSpec::fraction(0.5)?,
        QuadratureSpec::default(),
    )?;

    let poisson = OracleSolution::PoissonIntegral(Arc::new(PoissonDisk::new(&disk, data.clone())?));
    let monitors = Monitors {
        oracle: Some(poisson.sample(&lattice)?),
        sandwich: None,
    };
    let f0 = GridField::with_boundary(lattice.clone(), |_| 0.0, &data);
    let (f, report) = run_observed(
        &op,
        f0,
        &boundary,
        &StopRule::new(1e-7, 20_000)?,
        &monitors,
        |step, diff| {
            if step % 100 == 0 {
                println!("step {step:5}: sup diff {diff:.3e}");
            }
        },
    )?;

    println!(
        "{:?} after {} iterations",
        report.verdict, report.iterations
    );
    println!(
        "sup error vs Poisson integral: {:.3e}",
        report.oracle_error_history.last().unwrap()
    );
    let u = monitors.oracle.as_ref().unwrap();
    let inner = f.sup_diff_where(u, |x| x[0] * x[0] + x[1] * x[1] <= 0.81)?;
    println!("sup error on |x| <= 0.9:       {inner:.3e}");
    println!(
        "u(0, 0) = {:.6}, f(0, 0) = {:.6} (exact 2/π = {:.6})",
        poisson.eval(&[0.0, 0.0])?,
        f.eval(&[0.0, 0.0])?,
        2.0 / std::f64::consts::PI
    );
    Ok(())
}
