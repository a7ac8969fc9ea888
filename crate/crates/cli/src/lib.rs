//! Command-line front end: element parsing, run configuration and the
//! seeded verification suites behind `hv verify`.

pub mod commands;
pub mod config;
pub mod parser;
pub mod report;
pub mod specs;
pub mod suites;
