//! File formats, bundled toy data and the command layer of the `reltrans`
//! binary.

pub mod commands;
pub mod data;
pub mod formats;
pub mod verify;

pub use commands::{exit_code, run, Cli};
