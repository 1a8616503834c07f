//! Kirkwood-Dirac quasiprobability toolkit.

pub mod algebra;
pub mod bounds;
pub mod cycle;
pub mod error;
pub mod kd;
pub mod sampler;
pub mod spectral;
pub mod superop;

pub use error::{KdError, Result};
