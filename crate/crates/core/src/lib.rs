//! Harmonic extension by iterated ball averaging.
//!
//! Replaces a function by its mean over a ball `B(x, δ(x))` at every interior
//! point while keeping boundary values fixed, and iterates. On suitable
//! domains the iterates converge to the harmonic function with the given
//! boundary values. The crate also ships the reference solutions, barrier
//! bounds and convex-hull oracle used to check each step of that argument.

#![allow(clippy::needless_range_loop)]

pub mod averaging;
pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod iteration;
pub mod oracles;

pub use averaging::{AveragingOperator, BallStencil, QuadratureSpec, RadiusSpec};
pub use error::{Error, Result};
pub use field::{BoundaryData, BoundaryValues, GridField};
pub use geometry::{
    Convexity, Domain, DomainKind, GridSpec, Interpolation, Lattice, NodeLabel, NodeMask,
};
pub use iteration::{fixed_point_residual, run, IterationReport, Monitors, StopRule, Verdict};
pub use oracles::{Barrier, OracleSolution, PoissonDisk};
