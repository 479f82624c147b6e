pub mod error;
pub mod grid;

pub use error::{Error, Result};
pub mod jet;
pub mod material;
pub mod vectorfields;
pub mod analysis;
pub mod solver;
pub mod harness;
