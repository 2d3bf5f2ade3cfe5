//! Command line front end for `mana-core`: state files, CSV output, config
//! files and the chord fit.

pub mod cli;
pub mod commands;
pub mod config;
pub mod fit;
pub mod qsv;

pub use mana_core as core;
