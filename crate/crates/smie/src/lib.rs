pub mod error;
pub mod mat;
pub mod rng;
pub use error::{Result, SmieError};
