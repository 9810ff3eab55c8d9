//! Exact and estimated information flow over multivariate time series.

pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod flow;
pub mod info;
pub mod io;
pub mod lattice;
pub mod rng;
pub mod significance;

pub use error::{Error, Result};
