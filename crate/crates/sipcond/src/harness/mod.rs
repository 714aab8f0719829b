//! Experiment harness: configuration, CSV tables, subcommands and the
//! acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod table;
