use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use super::GridField;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::geometry::{Domain, Lattice};

type BoundaryFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Dirichlet data on the boundary of a domain.
///
/// Angles are measured counterclockwise around the domain center in the
/// first two coordinates, in `[0, 2π)`.
#[derive(Clone)]
pub enum BoundaryData {
    /// A closure of the boundary point.
    Function(BoundaryFn),
    /// An expression in `x`, `y`, `z` and `theta`.
    Expression(Expression),
    /// Values at equally spaced angles `2πk/len`, linearly interpolated and
    /// periodic.
    AngularTable(Vec<f64>),
    /// Values at the lower and upper end of an interval.
    Endpoints { lower: f64, upper: f64 },
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Function(_) => f.write_str("Function(..)"),
            BoundaryData::Expression(e) => f.debug_tuple("Expression").field(&e.source()).finish(),
            BoundaryData::AngularTable(t) => write!(f, "AngularTable({} values)", t.len()),
            BoundaryData::Endpoints { lower, upper } => f
                .debug_struct("Endpoints")
                .field("lower", lower)
                .field("upper", upper)
                .finish(),
        }
    }
}

/// Angle of `x` around `center` in the first two coordinates, in `[0, 2π)`.
pub(crate) fn boundary_angle(center: &[f64], x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let t = (x[1] - center[1]).atan2(x[0] - center[0]);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

impl BoundaryData {
    pub fn function(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryData::Function(Arc::new(f))
    }

    pub fn expression(source: &str) -> Result<Self> {
        Expression::parse(source).map(BoundaryData::Expression)
    }

    pub fn angular_table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "angular table needs at least 2 finite values".into(),
            ));
        }
        Ok(BoundaryData::AngularTable(values))
    }

    /// Checks that the data can be evaluated on `domain`.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        match self {
            BoundaryData::AngularTable(_) if domain.dim() < 2 => Err(Error::Config(
                "angular boundary table needs a domain of dimension 2 or 3".into(),
            )),
            BoundaryData::Endpoints { .. } if domain.dim() != 1 => Err(Error::Config(
                "endpoint boundary values need a 1-D domain".into(),
            )),
            BoundaryData::Endpoints { lower, upper }
                if !(lower.is_finite() && upper.is_finite()) =>
            {
                Err(Error::Config(
                    "endpoint boundary values must be finite".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Value at the boundary point `x` of `domain`.
    pub fn value_at(&self, domain: &Domain, x: &[f64]) -> f64 {
        match self {
            BoundaryData::Function(f) => f(x),
            BoundaryData::Expression(e) => e.eval(x, boundary_angle(&domain.center(), x)),
            BoundaryData::AngularTable(table) => {
                let t = boundary_angle(&domain.center(), x) / TAU * table.len() as f64;
                let k = (t.floor() as usize).min(table.len() - 1);
                let s = t - k as f64;
                (1.0 - s) * table[k] + s * table[(k + 1) % table.len()]
            }
            BoundaryData::Endpoints { lower, upper } => {
                if x[0] <= domain.center()[0] {
                    *lower
                } else {
                    *upper
                }
            }
        }
    }
}

/// Boundary values pinned at the boundary nodes of one lattice, aligned with
/// `lattice.mask().boundary()`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    values: Vec<f64>,
}

impl BoundaryValues {
    /// Samples `data` at the anchor of every boundary node.
    pub fn sample(lattice: &Lattice, data: &BoundaryData) -> Result<Self> {
        data.validate(lattice.domain())?;
        let n = lattice.dim();
        let mask = lattice.mask();
        let values: Vec<f64> = mask
            .boundary()
            .iter()
            .map(|&i| data.value_at(lattice.domain(), &mask.anchor(i)[..n]))
            .collect();
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "boundary data is not finite at boundary node {}",
                mask.boundary()[k]
            )));
        }
        Ok(BoundaryValues { values })
    }

    /// The boundary values a field already carries.
    pub fn from_field(field: &GridField) -> Self {
        let values = field
            .lattice()
            .mask()
            .boundary()
            .iter()
            .map(|&i| field.value(i))
            .collect();
        BoundaryValues { values }
    }

    /// Value at the `k`-th boundary node.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
