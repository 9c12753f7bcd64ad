//! Command-line front end, trace files and experiment runner for
//! [`somon_core`].

pub mod cli;
pub mod runner;
pub mod tracefile;
