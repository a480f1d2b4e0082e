//! Command implementations behind the `a2s` binary.
//!
//! Each command takes a resolved [`RunConfig`](a2s_core::config::RunConfig)
//! plus its own options, writes all outputs atomically into the run's
//! output directory, and returns the list of files it produced. The
//! binary in `main.rs` is only argument parsing around these functions,
//! so tests drive them directly.

pub mod commands;
