//! Library half of the `fronttrack` binary: run configuration, on-disk
//! formats, and the command implementations. `main` only parses flags and
//! maps command outcomes to exit codes.
//!
//! Exit code contract (shared by every subcommand):
//! `0` all checks passed, `1` a verdict or check failed, `2` malformed
//! input or missing files, `3` a run stopped early on its front budget.

pub mod commands;
pub mod config;
pub mod io;

/// Every check passed.
pub const EXIT_PASS: u8 = 0;
/// A verdict or regularity check failed.
pub const EXIT_VERDICT_FAIL: u8 = 1;
/// Malformed input, invalid configuration, or missing files.
pub const EXIT_INPUT_ERROR: u8 = 2;
/// Evolution stopped early on the front budget; outputs are partial.
pub const EXIT_TRUNCATED: u8 = 3;
