//! Positivity, duality and tensor cones of Toeplitz and block Toeplitz
//! matrices, made computational.

pub mod error;
pub mod fejer_riesz;
pub mod hardy;
pub mod block_cones;
pub mod cli;
pub mod duality;
pub mod entanglement;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod tolerance;
pub mod toeplitz;
pub mod trig;
pub mod wire;

pub use error::{Error, Result};
pub use tolerance::Tolerance;
