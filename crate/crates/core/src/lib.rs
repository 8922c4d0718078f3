pub mod cli;
pub mod compactification;
pub mod cover_algebra;
pub mod error;
pub mod measure_pressure;
pub mod misiurewicz;
pub mod systems;
pub mod topo_pressure;
pub mod zoo;

pub use error::{Error, Result};
