//! Expanding maps of the form `z -> beta * M z - d(z)` on lattice
//! fundamental domains, together with the numerical machinery to study their
//! invariant densities:
//!
//! - [`geometry`]: lattice domains, strip widths, covering radii, and
//!   largest-empty-ball searches with certified error bounds;
//! - [`dynamics`]: the map, digit expansions, preimage trees, hole-radius
//!   tracking, and the density/slab hypothesis checkers;
//! - [`transfer`]: Ulam discretization of the transfer operator, recurrent
//!   classes, and stationary densities;
//! - [`bounds`]: closed-form expansion thresholds (`B1`, `B2`, `C`) and
//!   per-map applicability verdicts;
//! - [`plank`]: inscribed balls in line arrangements on the unit disk and
//!   strip-covering witness searches.
//!
//! Heavy inner loops are data-parallel via rayon when the default `parallel`
//! feature is enabled; results are identical to the sequential fallback.

pub mod bounds;
pub mod config;
pub mod dynamics;
pub mod error;
mod exec;
pub mod geometry;
pub mod plank;
pub mod points;
pub mod search;
pub mod transfer;

pub use error::{Error, Result};
pub use exec::Exec;
