//! File formats and the `terrain-cwt` command line on top of
//! [`terrain_cwt_core`].

pub mod ascii;
mod atomic;
pub mod cli;
pub mod error;
pub mod export;
pub mod manifest;

pub use atomic::write_atomic;
pub use error::{Error, Result};
