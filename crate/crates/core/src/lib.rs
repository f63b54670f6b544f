pub mod cli;
pub mod cone;
pub mod error;
pub mod gindikin;
pub mod linalg;
pub mod quadratic;
pub mod verify;
pub mod wishart;

pub use error::{Error, Result};
