//! The guide's chapters, compiled so that every Rust snippet in the book
//! runs as a doc-test against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/grenander.md")]
pub mod grenander {}

#[doc = include_str!("../../../book/src/smoothing.md")]
pub mod smoothing {}

#[doc = include_str!("../../../book/src/resampling.md")]
pub mod resampling {}

#[doc = include_str!("../../../book/src/pointwise.md")]
pub mod pointwise {}

#[doc = include_str!("../../../book/src/l1-band.md")]
pub mod l1_band {}

#[doc = include_str!("../../../book/src/limit-lab.md")]
pub mod limit_lab {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
