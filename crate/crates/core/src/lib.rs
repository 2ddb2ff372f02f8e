pub mod blocks;
pub mod classify;
pub mod cli;
pub mod cone;
pub mod error;
pub mod funcs;
pub mod twist;

pub use error::{Error, Result};
