//! Orbits of the `x2, x3, x5` semigroup on the 2-torus.
//!
//! The crate computes orbits `{ 2^a 3^b 5^c (x, y) mod 1 }` in exact or
//! certified fixed-point arithmetic, classifies their closures (finite set,
//! union of lines, or dense), and measures them: grid coverage, covering
//! radii, local direction sets and simultaneous approximation records. It
//! also implements the combinatorial pieces used when reasoning about such
//! orbits: the `{2,3,5}` pair selection rule, the rhombus chain `E` around
//! the vertical axis with its pre-image property, and pre-image tracking.
//!
//! ```
//! use torus_orbits::{arith::parse_point, orbit};
//!
//! let start = parse_point("1/7,2/7", 64)?;
//! let closure = orbit::rational_closure(&start, &Default::default())?;
//! assert_eq!(closure.len(), 6);
//! # Ok::<(), torus_orbits::Error>(())
//! ```

pub mod arith;
pub mod construct;
pub mod density;
pub mod directions;
mod error;
pub mod geometry;
pub mod orbit;
pub mod raster;
pub mod report;
pub mod selection;
pub mod smooth;

pub use error::{Error, Result};
