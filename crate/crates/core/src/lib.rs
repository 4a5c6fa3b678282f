pub mod channels;
pub mod cli;
pub mod cloning;
pub mod config;
pub mod error;
pub mod linalg;
pub mod sampler;
pub mod sdp;

pub use config::Tolerances;
pub use error::{Error, Result};
