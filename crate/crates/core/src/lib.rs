pub mod complex;
pub mod config;
pub mod error;
pub mod gallery;
#[cfg(test)]
mod fixtures;
pub mod geom;
pub mod norms;
pub mod oracle;
pub mod paths;
pub mod saddle;
pub mod shortening;

pub use complex::{Complex, Face, FaceId, Gluing, Point};
pub use config::{RadiusConfig, SearchConfig, ShortenConfig, Tolerances};
pub use error::{Error, Result};
pub use norms::{Norm, Side};
