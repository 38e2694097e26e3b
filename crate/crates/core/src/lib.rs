//! Simulation of random walks in random scenery, the random rewards schema
//! and their stable, self-similar limit process.

pub mod cli;
pub mod error;
pub mod rng;
pub mod scenery;
pub mod schema;
pub mod stable;
pub mod stats;
pub mod walk;
pub mod limit;

pub use error::{Error, Result};
pub use stable::StableLaw;
