//! Exact construction of continuous functions with low oscillation.

pub mod analysis;
pub mod bracket;
pub mod config;
pub mod build1d;
pub mod buildmd;
pub mod error;
pub mod exactgeom;
pub mod gallery;
pub mod params;
pub mod whitney;

pub use bracket::EvalResult;
pub use config::RunConfig;
pub use error::{Error, Result};
pub use exactgeom::{Cube, Cuboid, Interval, Scalar};
pub use params::ARule;
