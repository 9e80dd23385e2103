//! Plain (P2) grayscale images of a field.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::GridField;

/// Renders `field` as a P2 image with 255 levels.
///
/// Active nodes are min–max normalized onto `1..=255`; exterior nodes are 0.
/// Image rows run from the top (largest second coordinate) down. 3-D fields
/// show the middle slice along the last axis.
pub fn to_pgm_string(field: &GridField) -> String {
    let grid = field.lattice().grid();
    let nodes = grid.nodes();
    let width = nodes[0];
    let height = if nodes.len() > 1 { nodes[1] } else { 1 };
    let offset = if nodes.len() > 2 {
        (nodes[2] / 2) * width * height
    } else {
        0
    };
    let (lo, hi) = field.range();
    let level = |v: f64| -> u32 {
        if v.is_nan() {
            0
        } else if hi > lo {
            1 + ((v - lo) / (hi - lo) * 254.0).round() as u32
        } else {
            128
        }
    };
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in (0..height).rev() {
        let line: Vec<String> = (0..width)
            .map(|col| level(field.value(offset + row * width + col)).to_string())
            .collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn write_pgm(field: &GridField, path: &Path) -> Result<()> {
    std::fs::write(path, to_pgm_string(field)).map_err(|e| Error::io(path, e))
}
