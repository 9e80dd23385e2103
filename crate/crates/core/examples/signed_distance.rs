//! Domains: signed distance, convexity class and the node mask.
//!
//! cargo run --example signed_distance

use harmavg::{Domain, GridSpec, Lattice, NodeLabel};

fn main() -> harmavg::Result<()> {
    let domains = [
        ("unit disk", Domain::unit_ball(2)?),
        ("ellipse 2x1", Domain::ellipse([0.0, 0.0], [2.0, 1.0])?),
        (
            "superellipse p=4",
            Domain::superellipse([0.0, 0.0], [1.0, 1.0], 4.0)?,
        ),
        ("unit square", Domain::cuboid(&[0.0, 0.0], &[1.0, 1.0])?),
    ];
    let probes = [[0.0, 0.0], [0.5, 0.5], [0.9, 0.2], [1.5, 0.0]];

    for (name, domain) in &domains {
        println!("{name}: {:?}", domain.convexity());
        for p in &probes {
            println!(
                "  sd({:>4}, {:>4}) = {:+.6}",
                p[0],
                p[1],
                domain.signed_distance(p) + 0.0
            );
        }
        let on = domain.project_to_boundary(&[0.9, 0.2]);
        println!(
            "  nearest boundary point to (0.9, 0.2): ({:.6}, {:.6})",
            on[0], on[1]
        );

        let lattice = Lattice::new(domain.clone(), GridSpec::tight_uniform(domain, 33)?)?;
        let mask = lattice.mask();
        let exterior = (0..lattice.grid().len())
            .filter(|&i| mask.label(i) == NodeLabel::Exterior)
            .count();
        println!(
            "  33x33 grid: {} interior, {} boundary, {exterior} exterior nodes",
            mask.interior().len(),
            mask.boundary().len()
        );
    }
    Ok(())
}
