//! Implementation of the `ptbands` command-line tool: configuration
//! resolution, subcommand logic, and deterministic CSV/JSON emission.
//! The binary in `main.rs` is a thin clap dispatcher over [`commands`].

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
