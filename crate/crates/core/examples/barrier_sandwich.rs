//! The barrier bound |f_n − u| <= K h along a run started from a harmonic
//! function plus a bump.
//!
//! cargo run --release --example barrier_sandwich

use std::sync::Arc;

use harmavg::oracles::{barrier_constant, check_barrier_sandwich, sandwich_tolerance, Sandwich};
use harmavg::{
    AveragingOperator, Barrier, BoundaryValues, Domain, GridField, GridSpec, Lattice,
    OracleSolution, QuadratureSpec, RadiusSpec,
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

    let oracle = OracleSolution::harmonic_poly(2)?;
    let u = oracle.sample(&lattice)?;
    let boundary = BoundaryValues::from_field(&u);
    let h = Barrier::new(&disk)?.sample(&lattice);
    let f0 = u.zip_with(
        &GridField::from_fn(lattice.clone(), |x| {
            let s2 = (x[0] * x[0] + x[1] * x[1]) / 0.25;
            if s2 < 1.0 {
                0.1 * (1.0 - 1.0 / (1.0 - s2)).exp()
            } else {
                0.0
            }
        }),
        |a, b| a + b,
    )?;

    let k = barrier_constant(&f0, &u, &h)?;
    let tol = sandwich_tolerance(&op, &u, &boundary)?;
    println!(
        "K = {:.6} (0.1 / h(0) = 0.4), {} nodes excluded, tolerance {tol:.2e}",
        k.k,
        k.excluded.len()
    );
    let sandwich = Sandwich::new(u.clone(), h, k.k, tol)?;

    let mut f = f0;
    for n in 0..=400 {
        let report = check_barrier_sandwich(&f, &sandwich)?;
        if n % 50 == 0 {
            // the overall minimum sits on the boundary, where both sides vanish
            let interior = lattice
                .mask()
                .interior()
                .iter()
                .map(|&i| k.k * sandwich.h.value(i) - (f.value(i) - u.value(i)).abs())
                .fold(f64::INFINITY, f64::min);
            println!(
                "n = {n:3}: |f - u| = {:.3e}, min margin {:+.3e}, interior min margin {interior:+.3e}",
                f.sup_diff(&u)?,
                report.min_margin
            );
        }
        assert!(report.passed);
        f = op.apply(&f, &boundary)?;
    }
    Ok(())
}
