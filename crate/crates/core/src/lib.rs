//! Verification engine for the homogeneous nearly Kähler S³×S³.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod codazzi;
pub mod error;
pub mod exact;
pub(crate) mod fd;
pub mod humfit;
pub mod lagrangian;
pub mod nkgeom;
pub mod quat;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
