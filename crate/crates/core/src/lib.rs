//! Exact arithmetic, geometry and certificates for point packings in the
//! unit l1 cross-polytope.

pub mod arith;
pub mod error;
pub mod figure;
pub mod geometry;
pub mod packings;
pub mod region;
pub mod search;
pub mod table;

pub use arith::{AffR, RInterval, Rat, Verdict};
pub use error::{Error, Result};
