pub mod arith;
pub mod dynamics;
pub mod ergodic;
pub mod error;
pub mod harness;
pub mod numeric;
pub mod special_numbers;

pub use error::{Error, Result};
