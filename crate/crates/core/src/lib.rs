//! Exact computations on the perfect-matching association scheme of `K_2n`.

pub mod arith;
pub mod bounds;
pub mod cache;
pub mod characters;
pub mod cli;
pub mod error;
pub mod families;
pub mod graphs;
pub mod isoperimetry;
pub mod matchings;
pub mod mis;
pub mod partitions;
pub mod spherical;

pub use error::{Error, Result};
