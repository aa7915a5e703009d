pub mod engine;
pub mod error;
pub mod kinematics;
pub mod wavepackets;

pub use error::{QcaError, Result};
