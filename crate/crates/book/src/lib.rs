//! Code listings from the guide in `book/`, compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/arithmetic.md")]
pub mod arithmetic {}
#[doc = include_str!("../../../book/src/orbits.md")]
pub mod orbits {}
#[doc = include_str!("../../../book/src/gaps.md")]
pub mod gaps {}
#[doc = include_str!("../../../book/src/rhombus.md")]
pub mod rhombus {}
#[doc = include_str!("../../../book/src/directions.md")]
pub mod directions {}
#[doc = include_str!("../../../book/src/density.md")]
pub mod density {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
