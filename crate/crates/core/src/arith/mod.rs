//! Arithmetic modulo 1.
//!
//! Two backends share one interface through [`TorusValue`]:
//!
//! - [`Rat`]: exact reduced fractions in `[0, 1)`.
//! - [`FixedReal`]: binary fixed point with an error multiplier. The true
//!   value is within `err_mult * 2^-bits` of the stored one. Multiplying by
//!   an integer `k` multiplies that bound by `k`, which is all the orbit
//!   machinery ever needs.
//!
//! Points never mix backends: both coordinates of a [`TorusPoint`] carry
//! the same tag (and, for fixed point, the same bit count). Results of
//! distance-like queries come back as a [`Bound`], which is exact for
//! fractions and an enclosure otherwise.

mod bound;
mod fixed;
mod rat;
mod value;

pub use bound::Bound;
pub use fixed::{bits_for, FixedReal};
pub use rat::Rat;
pub use value::{parse_point, parse_rational, parse_value, torus_distance, TorusPoint, TorusValue};
