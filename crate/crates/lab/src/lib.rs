//! File formats, parallel drivers and command implementations around
//! `requant-core`.

pub mod commands;
mod error;
pub mod numfmt;
pub mod parallel;
pub mod pgm;
pub mod range;
pub mod table;
pub mod verify;

pub use error::{LabError, Result};
