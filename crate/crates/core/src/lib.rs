pub mod boundary;
pub mod canonical;
pub mod cli;
pub mod confgeo;
pub mod error;
pub mod field;
pub mod jet;
pub mod quadverify;
pub mod scalar;
pub mod symfun;

pub use error::{Error, Result};
