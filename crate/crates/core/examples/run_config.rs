//! Driving a run from a TOML config, as the `harmavg` binary does, and
//! writing the field as CSV and PGM.
//!
//! cargo run --release --example run_config

use harmavg::cli::pgm::to_pgm_string;
use harmavg::cli::{run_suite, solve, RunConfig, Suite};
use harmavg::field::csv::to_csv_string;

const CONFIG: &str = r#"
schema_version = 1

[domain]
kind = "ellipse"
center = [0.0, 0.0]
semi_axes = [1.0, 0.6]

[grid]
nodes = 49

[oracle]
kind = "fundamental_shifted"
pole = [1.5, 1.0]

[init]
kind = "zero"

[stop]
tol = 1e-7
max_iter = 20000
"#;

fn main() -> harmavg::Result<()> {
    let config = RunConfig::from_toml_str(CONFIG)?;
    let (field, report) = solve(&config, true)?;
    println!(
        "{:?} after {} iterations, oracle error {:.3e}",
        report.verdict,
        report.iterations,
        report.oracle_error_history.last().unwrap()
    );
    let csv = to_csv_string(&field);
    println!(
        "CSV: {} lines, header {:?}",
        csv.lines().count(),
        csv.lines().next().unwrap()
    );
    let pgm = to_pgm_string(&field);
    println!("PGM header: {:?}", pgm.lines().take(3).collect::<Vec<_>>());

    for suite in [Suite::Lemma1, Suite::Hull, Suite::Fixedpoint] {
        let v = run_suite(&config, suite)?;
        println!("verify {suite}: passed {}", v.passed);
        for c in &v.checks {
            println!("  {}: {:.3e} (limit {:.1e})", c.name, c.value, c.limit);
        }
    }
    Ok(())
}
