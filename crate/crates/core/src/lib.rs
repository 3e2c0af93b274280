pub mod cli;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod schemes;
pub mod vi;
pub mod zeroth_order;

pub type Point = nalgebra::DVector<f64>;

pub use error::{Error, Result};
