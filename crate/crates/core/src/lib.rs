//! Exact computer algebra for commutative BV∞ algebras with a trace.

pub mod error;
pub mod gla;

pub use error::{Error, Result};
pub mod bv;
pub mod cli;
pub mod models;
pub mod report;
pub mod retract;
pub mod degeneration;
pub mod cyclic;
pub mod flat;
pub mod qme;
pub mod frobenius;
pub mod pipeline;
