//! The run configuration: one TOML file per run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::averaging::{AveragingOperator, QuadratureSpec, RadiusSpec};
use crate::error::{Error, Result};
use crate::field::{BoundaryData, BoundaryValues, GridField};
use crate::geometry::{Domain, GridSpec, Interpolation, Lattice};
use crate::iteration::StopRule;
use crate::oracles::{OracleSolution, PoissonDisk};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval {
        lo: f64,
        hi: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
    },
    Superellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        exponent: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainConfig::Interval { lo, hi } => Domain::interval(*lo, *hi),
            DomainConfig::Ball { center, radius } => Domain::ball(center, *radius),
            DomainConfig::Ellipse { center, semi_axes } => Domain::ellipse(*center, *semi_axes),
            DomainConfig::Superellipse {
                center,
                semi_axes,
                exponent,
            } => Domain::superellipse(*center, *semi_axes, *exponent),
            DomainConfig::Box { lo, hi } => Domain::cuboid(lo, hi),
        }
    }
}

/// Node count for every axis, or one count per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nodes {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nodes: Nodes,
    /// Box corners; the domain's tight box when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
    #[serde(default)]
    pub interpolation: Interpolation,
}

impl GridConfig {
    pub fn build(&self, domain: &Domain) -> Result<GridSpec> {
        let nodes = match &self.nodes {
            Nodes::Uniform(k) => vec![*k; domain.dim()],
            Nodes::PerAxis(v) => v.clone(),
        };
        let (tight_lo, tight_hi) = domain.bounding_box();
        let lo = self.lo.clone().unwrap_or(tight_lo);
        let hi = self.hi.clone().unwrap_or(tight_hi);
        GridSpec::new(&lo, &hi, &nodes)
    }
}

/// Boundary data; exactly one form may be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// Expression in `x`, `y`, `z` and `theta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    /// Values at equally spaced angles, periodic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
    /// Interval end values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

impl BoundaryConfig {
    fn build(&self) -> Result<Option<BoundaryData>> {
        let forms = [
            self.expression.is_some(),
            self.table.is_some(),
            self.lower.is_some() || self.upper.is_some(),
        ];
        match forms.iter().filter(|f| **f).count() {
            0 => return Ok(None),
            1 => {}
            _ => {
                return Err(Error::Config(
                    "boundary: give exactly one of expression, table, lower/upper".into(),
                ))
            }
        }
        if let Some(e) = &self.expression {
            return BoundaryData::expression(e).map(Some);
        }
        if let Some(t) = &self.table {
            return BoundaryData::angular_table(t.clone()).map(Some);
        }
        match (self.lower, self.upper) {
            (Some(lower), Some(upper)) => Ok(Some(BoundaryData::Endpoints { lower, upper })),
            _ => Err(Error::Config(
                "boundary: lower and upper go together".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleConfig {
    HarmonicPoly {
        degree: u32,
    },
    /// Poisson integral of the configured boundary data (disks only).
    Poisson {},
    /// The line through the interval's end values.
    #[serde(rename = "linear_1d")]
    Linear1d {},
    FundamentalShifted {
        pole: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    Zero {},
    Oracle {},
    /// Oracle plus `height · exp(1 − 1/(1 − (r/width)²))` for `r < width`.
    OraclePlusBump {
        center: Vec<f64>,
        width: f64,
        height: f64,
    },
    Expression {
        expression: String,
    },
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig::Zero {}
    }
}

/// Smooth bump of the given height supported in `B(center, width)`.
pub fn bump(center: &[f64], width: f64, height: f64, x: &[f64]) -> f64 {
    let s = crate::geometry::dist(x, center) / width;
    if s >= 1.0 {
        0.0
    } else {
        height * (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_pgm: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study_csv: Option<PathBuf>,
    /// Wall time makes reports differ between runs, so it is opt-in.
    #[serde(default)]
    pub record_wall_time: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub fixedpoint_tol: f64,
    pub random_fields: usize,
    pub hull_samples: usize,
    pub hull_queries: usize,
    pub probe_pairs: usize,
    pub descent_nodes: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            fixedpoint_tol: 2e-3,
            random_fields: 100,
            hull_samples: 2000,
            hull_queries: 100,
            probe_pairs: 500,
            descent_nodes: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub domain: DomainConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub radius: RadiusSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Directory that relative output paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Everything a command needs, built from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Instance {
    pub lattice: Arc<Lattice>,
    pub operator: AveragingOperator,
    pub boundary_data: BoundaryData,
    pub boundary: BoundaryValues,
    pub oracle: Option<OracleSolution>,
    pub f0: GridField,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config file; relative output paths resolve
    /// against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.radius.validate()?;
        self.quadrature.validate()?;
        self.stop.validate()?;
        let v = &self.verify;
        if v.fixedpoint_tol.is_nan()
            || v.fixedpoint_tol <= 0.0
            || v.random_fields == 0
            || v.hull_queries == 0
            || v.probe_pairs == 0
        {
            return Err(Error::Config(
                "verify: tolerances and counts must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn output_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<Instance> {
        self.validate()?;
        let domain = self.domain.build()?;
        let grid = self.grid.build(&domain)?;
        let lattice = Arc::new(
            Lattice::new(domain.clone(), grid)?.with_interpolation(self.grid.interpolation),
        );
        let explicit = self.boundary.build()?;
        let oracle = match &self.oracle {
            None => None,
            Some(OracleConfig::HarmonicPoly { degree }) => {
                Some(OracleSolution::harmonic_poly(*degree)?)
            }
            Some(OracleConfig::FundamentalShifted { pole }) => {
                Some(OracleSolution::FundamentalShifted { pole: pole.clone() })
            }
            Some(OracleConfig::Poisson {}) => {
                let data = explicit.clone().ok_or_else(|| {
                    Error::Config("oracle `poisson` needs a [boundary] section".into())
                })?;
                Some(OracleSolution::PoissonIntegral(Arc::new(PoissonDisk::new(
                    &domain, data,
                )?)))
            }
            Some(OracleConfig::Linear1d {}) => {
                let (Some(lower), Some(upper)) = (self.boundary.lower, self.boundary.upper) else {
                    return Err(Error::Config(
                        "oracle `linear_1d` needs boundary lower/upper".into(),
                    ));
                };
                let DomainConfig::Interval { lo, hi } = self.domain else {
                    return Err(Error::Config(
                        "oracle `linear_1d` needs an interval domain".into(),
                    ));
                };
                Some(OracleSolution::Linear1d {
                    lo,
                    hi,
                    a: lower,
                    b: upper,
                })
            }
        };
        if let Some(o) = &oracle {
            o.validate(&domain)?;
        }
        let boundary_data = match (explicit, &oracle) {
            (Some(b), _) => b,
            (None, Some(o)) => o.boundary_data(),
            (None, None) => {
                return Err(Error::Config(
                    "give a [boundary] section or an [oracle]".into(),
                ))
            }
        };
        let boundary = BoundaryValues::sample(&lattice, &boundary_data)?;
        let need_oracle = || {
            oracle
                .clone()
                .ok_or_else(|| Error::Config("this init kind needs an [oracle] section".into()))
        };
        let f0 = match &self.init {
            InitConfig::Zero {} => {
                GridField::with_boundary(lattice.clone(), |_| 0.0, &boundary_data)
            }
            InitConfig::Oracle {} => {
                let u = need_oracle()?;
                GridField::with_boundary(
                    lattice.clone(),
                    |x| u.eval(x).unwrap_or(f64::NAN),
                    &boundary_data,
                )
            }
            InitConfig::OraclePlusBump {
                center,
                width,
                height,
            } => {
                if center.len() != domain.dim()
                    || width.is_nan()
                    || *width <= 0.0
                    || !height.is_finite()
                {
                    return Err(Error::Config(
                        "init bump: bad center, width or height".into(),
                    ));
                }
                let u = need_oracle()?;
                GridField::with_boundary(
                    lattice.clone(),
                    |x| u.eval(x).unwrap_or(f64::NAN) + bump(center, *width, *height, x),
                    &boundary_data,
                )
            }
            InitConfig::Expression { expression } => {
                let e = crate::expr::Expression::parse(expression)?;
                let c = domain.center();
                GridField::with_boundary(
                    lattice.clone(),
                    |x| e.eval(x, crate::field::boundary_angle(&c, x)),
                    &boundary_data,
                )
            }
        };
        let f0 = GridField::from_values(lattice.clone(), f0.values().to_vec())?;
        let operator = AveragingOperator::new(lattice.clone(), self.radius, self.quadrature)?;
        Ok(Instance {
            lattice,
            operator,
            boundary_data,
            boundary,
            oracle,
            f0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = r#"
schema_version = 1
[domain]
kind = "ball"
center = [0.0, 0.0]
radius = 1.0
[grid]
nodes = 17
[oracle]
kind = "harmonic_poly"
degree = 2
[init]
kind = "oracle"
"#;

    #[test]
    fn minimal_config_builds_with_defaults() {
        let c = RunConfig::from_toml_str(DISK).unwrap();
        assert_eq!(c.radius, RadiusSpec::default());
        assert_eq!(c.stop, StopRule::default());
        assert!(!c.outputs.record_wall_time);
        let inst = c.build().unwrap();
        assert_eq!(inst.lattice.grid().nodes(), &[17, 17]);
        let u = inst.oracle.unwrap().sample(&inst.lattice).unwrap();
        assert!(inst.f0.sup_diff(&u).unwrap() < 1e-15);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let unknown = DISK.replace("[init]", "[init]\ncolour = 3");
        assert!(matches!(
            RunConfig::from_toml_str(&unknown),
            Err(Error::Config(_))
        ));
        let negative = format!("{DISK}\n[radius]\nkind = \"distance_fraction\"\nc = -0.5\n");
        assert!(RunConfig::from_toml_str(&negative).is_err());
        let version = DISK.replace("schema_version = 1", "schema_version = 2");
        assert!(RunConfig::from_toml_str(&version).is_err());
        let both = format!("{DISK}\n[boundary]\nexpression = \"x\"\ntable = [1.0, 2.0]\n");
        assert!(RunConfig::from_toml_str(&both).unwrap().build().is_err());
        let no_data = DISK
            .replace("[oracle]\nkind = \"harmonic_poly\"\ndegree = 2\n", "")
            .replace("\"oracle\"", "\"zero\"");
        assert!(matches!(
            RunConfig::from_toml_str(&no_data).unwrap().build(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn bump_has_its_height_at_the_center_and_vanishes_outside() {
        assert_eq!(bump(&[0.0, 0.0], 0.5, 0.1, &[0.0, 0.0]), 0.1);
        assert_eq!(bump(&[0.0, 0.0], 0.5, 0.1, &[0.5, 0.0]), 0.0);
        let inside = bump(&[0.0, 0.0], 0.5, 0.1, &[0.49, 0.0]);
        assert!(inside > 0.0 && inside < 1e-10);
    }

    #[test]
    fn relative_outputs_resolve_against_the_config_directory() {
        let mut c = RunConfig::from_toml_str(DISK).unwrap();
        c.base_dir = PathBuf::from("/tmp/runs");
        assert_eq!(
            c.output_path(Path::new("a.csv")),
            PathBuf::from("/tmp/runs/a.csv")
        );
        assert_eq!(
            c.output_path(Path::new("/abs.csv")),
            PathBuf::from("/abs.csv")
        );
    }
}
