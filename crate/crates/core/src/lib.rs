//! Site-specific simulation of IRS-assisted downlinks and multi-IRS
//! deployment planning.
//!
//! The pipeline runs scene geometry -> radiation patterns -> per-link
//! statistics -> Monte-Carlo link metrics -> placement and association.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod link;
pub mod pattern;
pub mod planner;
pub mod presets;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
