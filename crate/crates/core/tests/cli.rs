//! The `harmavg` binary end to end: exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

fn harmavg(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmavg"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--quiet")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, format!("schema_version = 1\n{body}")).unwrap();
    path
}

const DISK: &str = r#"
[domain]
kind = "ball"
center = [0.0, 0.0]
radius = 1.0
[grid]
nodes = 33
"#;

#[test]
fn harmonic_start_converges_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "{DISK}[oracle]\nkind = \"harmonic_poly\"\ndegree = 2\n[init]\nkind = \"oracle\"\n[stop]\ntol = 1e-3\nmax_iter = 10\n\
             [outputs]\nfield_csv = \"f.csv\"\nreport_json = \"r.json\"\nimage_pgm = \"f.pgm\"\n"
        ),
    );
    let out = harmavg(&["solve"], &cfg);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "converged");
    assert!(report["wall_time_seconds"].is_null());
    assert_eq!(report["config"]["grid"]["nodes"], 33);
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert!(csv.starts_with("# axis0: "));
    assert_eq!(csv.lines().count(), 2 + 33);
    let pgm = std::fs::read_to_string(dir.path().join("f.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n33 33\n255\n"));
}

#[test]
fn wall_time_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{DISK}[boundary]\nexpression = \"x\"\n[outputs]\nreport_json = \"r.json\"\nrecord_wall_time = true\n"),
    );
    assert_eq!(harmavg(&["solve"], &cfg).status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(report["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn truncated_run_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{DISK}[boundary]\nexpression = \"abs(cos(theta))\"\n[stop]\ntol = 1e-6\nmax_iter = 1\n"),
    );
    assert_eq!(harmavg(&["solve"], &cfg).status.code(), Some(2));
}

#[test]
fn stalled_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[domain]\nkind = \"interval\"\nlo = 0.0\nhi = 1.0\n[grid]\nnodes = 9\n[boundary]\nlower = 1.0\nupper = 3.0\n\
         [stop]\ntol = 1e-300\nmax_iter = 100000\nstall_window = 5\n",
    );
    assert_eq!(harmavg(&["solve"], &cfg).status.code(), Some(3));
}

#[test]
fn config_errors_exit_1_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        format!("{DISK}[boundary]\nexpression = \"x\"\n[radius]\nkind = \"distance_fraction\"\nc = -0.5\n"),
        format!("{DISK}[boundary]\nexpression = \"x\"\nshade = 2\n"),
        format!("{DISK}[boundary]\nexpression = \"x +\"\n"),
        DISK.to_string(),
    ] {
        let cfg = write_config(dir.path(), &body);
        let out = harmavg(&["solve"], &cfg);
        assert_eq!(out.status.code(), Some(1), "{body}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    let missing = harmavg(&["solve"], &dir.path().join("absent.toml"));
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_suites_report_and_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "{DISK}[boundary]\nexpression = \"x^2 - y^2\"\n[init]\nkind = \"expression\"\nexpression = \"x^2 - y^2\"\n\
             [verify]\nrandom_fields = 10\nhull_samples = 300\nhull_queries = 20\n[outputs]\nreport_json = \"v.json\"\n"
        ),
    );
    for suite in ["lemma1", "hull"] {
        let out = harmavg(&["verify", "--suite", suite], &cfg);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{suite}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap())
                .unwrap();
        assert_eq!(report["suite"], suite);
        assert_eq!(report["passed"], true);
    }
    assert_eq!(
        harmavg(&["verify", "--suite", "median"], &cfg)
            .status
            .code(),
        Some(1)
    );
    // no oracle configured
    assert_eq!(
        harmavg(&["verify", "--suite", "fixedpoint"], &cfg)
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn fixedpoint_on_constant_data_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{DISK}[oracle]\nkind = \"harmonic_poly\"\ndegree = 0\n[outputs]\nreport_json = \"v.json\"\n"),
    );
    assert_eq!(
        harmavg(&["verify", "--suite", "fixedpoint"], &cfg)
            .status
            .code(),
        Some(0)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert!(report["checks"][0]["value"].as_f64().unwrap() <= 1e-14);
}

#[test]
fn failed_assertion_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{DISK}[oracle]\nkind = \"harmonic_poly\"\ndegree = 3\n[verify]\nfixedpoint_tol = 1e-12\n"),
    );
    assert_eq!(
        harmavg(&["verify", "--suite", "fixedpoint"], &cfg)
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn square_hull_is_informational_and_barrier_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[domain]\nkind = \"box\"\nlo = [0.0, 0.0]\nhi = [1.0, 1.0]\n[grid]\nnodes = 21\n\
         [oracle]\nkind = \"harmonic_poly\"\ndegree = 2\n[init]\nkind = \"oracle\"\n\
         [verify]\nhull_samples = 200\nhull_queries = 10\n[outputs]\nreport_json = \"v.json\"\n",
    );
    assert_eq!(
        harmavg(&["verify", "--suite", "hull"], &cfg).status.code(),
        Some(0)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["asserted"] == false));
    assert_eq!(
        harmavg(&["verify", "--suite", "barrier"], &cfg)
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn study_sweeps_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[domain]\nkind = \"ball\"\ncenter = [0.0, 0.0]\nradius = 1.0\n[grid]\nnodes = 17\n\
         [oracle]\nkind = \"harmonic_poly\"\ndegree = 3\n[init]\nkind = \"oracle\"\n[stop]\ntol = 1e-3\nmax_iter = 200\n\
         [outputs]\nstudy_csv = \"s.csv\"\n",
    );
    let out = harmavg(&["study", "--sweep", "resolution=33,65,129"], &cfg);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("parameter,value,iterations,verdict,final_oracle_error,one_step_residual")
    );
    let residuals: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(residuals.len(), 3);
    assert!(
        residuals[0] > residuals[1] && residuals[1] > residuals[2],
        "{residuals:?}"
    );

    assert_eq!(
        harmavg(&["study", "--sweep", "resolution="], &cfg)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        harmavg(&["study", "--sweep", "tol=1"], &cfg).status.code(),
        Some(1)
    );
}
