//! File formats and subcommand implementations behind the `nukc` binary,
//! exposed as a library so integration tests can build and parse the same
//! documents the binary does.

pub mod commands;
pub mod schema;
