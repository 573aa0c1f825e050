//! Khovanov homology of rational tangles and their closures.
//!
//! Two independent engines are provided. [`zigzag`] and [`closure`] follow
//! the morphism-string rewriting rules and compute homology in time roughly
//! linear in the crossing number. [`cube`] builds the full cube of
//! resolutions from a planar diagram and serves as the reference.

pub mod cli;
pub mod closure;
pub mod cobcat;
pub mod cube;
pub mod error;
pub mod fraction;
pub mod zigzag;

pub use error::{Error, Result};
