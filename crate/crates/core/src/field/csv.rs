//! Plain-text field dumps.
//!
//! One header line `# axisK: min max n` per axis, then the node values with
//! axis 0 varying fastest along each line. Values use 17 significant digits,
//! so a write/read cycle is bit-exact; exterior nodes are written as `nan`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::GridField;
use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Lattice};

/// Axis header and node values parsed from a field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    /// `(min, max, nodes)` per axis.
    pub axes: Vec<(f64, f64, usize)>,
    pub values: Vec<f64>,
}

fn fmt_value(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else {
        write!(out, "{v:.16e}").unwrap();
    }
}

pub fn to_csv_string(field: &GridField) -> String {
    let grid = field.lattice().grid();
    let mut out = String::new();
    for axis in 0..grid.dim() {
        out.push_str(&format!("# axis{axis}: "));
        fmt_value(&mut out, grid.lo()[axis]);
        out.push(' ');
        fmt_value(&mut out, grid.hi()[axis]);
        writeln!(out, " {}", grid.nodes()[axis]).unwrap();
    }
    let row = grid.nodes()[0];
    for (i, &v) in field.values().iter().enumerate() {
        fmt_value(&mut out, v);
        out.push(if (i + 1) % row == 0 { '\n' } else { ',' });
    }
    out
}

pub fn write_csv(field: &GridField, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(field)).map_err(|e| Error::io(path, e))
}

fn parse_value(tok: &str) -> Result<f64> {
    let tok = tok.trim();
    if tok == "nan" {
        return Ok(f64::NAN);
    }
    tok.parse()
        .map_err(|_| Error::Csv(format!("bad number `{tok}`")))
}

pub fn parse_csv(text: &str) -> Result<FieldDump> {
    let mut axes = Vec::new();
    let mut values = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        if let Some(header) = line.strip_prefix('#') {
            if !values.is_empty() {
                return Err(Error::Csv("header line after data".into()));
            }
            let (name, rest) = header
                .split_once(':')
                .ok_or_else(|| Error::Csv(format!("bad header `{line}`")))?;
            if name.trim() != format!("axis{}", axes.len()) {
                return Err(Error::Csv(format!("unexpected header `{}`", name.trim())));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Csv(format!("bad header `{line}`")));
            }
            let n = parts[2]
                .parse()
                .map_err(|_| Error::Csv(format!("bad node count `{}`", parts[2])))?;
            axes.push((parse_value(parts[0])?, parse_value(parts[1])?, n));
        } else {
            for tok in line.split(',') {
                values.push(parse_value(tok)?);
            }
        }
    }
    if axes.is_empty() {
        return Err(Error::Csv("missing axis header".into()));
    }
    let expected: usize = axes.iter().map(|a| a.2).product();
    if values.len() != expected {
        return Err(Error::Csv(format!(
            "expected {expected} values, found {}",
            values.len()
        )));
    }
    Ok(FieldDump { axes, values })
}

/// Reads a dump back onto `lattice`, whose grid must match the header.
pub fn read_csv(lattice: Arc<Lattice>, text: &str) -> Result<GridField> {
    let dump = parse_csv(text)?;
    let lo: Vec<f64> = dump.axes.iter().map(|a| a.0).collect();
    let hi: Vec<f64> = dump.axes.iter().map(|a| a.1).collect();
    let nodes: Vec<usize> = dump.axes.iter().map(|a| a.2).collect();
    if GridSpec::new(&lo, &hi, &nodes)? != *lattice.grid() {
        return Err(Error::LatticeMismatch);
    }
    GridField::from_values(lattice, dump.values)
}
