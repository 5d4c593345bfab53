//! Library behind the `orbitforge` binary.

pub mod app;
pub mod curves;
pub mod grid;
pub mod render;

pub use app::{run, Cli, EXIT_DISAGREE, EXIT_IO, EXIT_OK, EXIT_USAGE};
