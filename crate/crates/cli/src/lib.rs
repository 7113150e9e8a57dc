//! File formats and command-line front end for `smartgame-core`.

pub mod commands;
pub mod config;
pub mod format;
