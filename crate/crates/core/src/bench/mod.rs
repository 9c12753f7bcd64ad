//! Workload generators and formula builders for the experiments.
//!
//! Each family yields an [`ApUniverse`](crate::ApUniverse), a trace stream
//! and formula text; compiling and monitoring is left to the caller.

pub mod fig3;
pub mod muddy;
pub mod planning;
pub mod sender_receiver;

use alloc::vec::Vec;

use crate::ap::ApUniverse;
use crate::syntax::{compile, Formula};
use crate::ApSet;

/// Compiles benchmark formula text over a benchmark universe.
///
/// Panics if the text does not compile, which would be a bug in the
/// builder.
pub fn build(text: &str, universe: &ApUniverse) -> Formula {
    let mut universe = universe.clone();
    match compile(text, &mut universe) {
        Ok(f) => f,
        Err(e) => panic!("benchmark formula does not compile: {e}"),
    }
}

/// Traces as words, the form the monitor consumes.
pub type Stream = Vec<Vec<ApSet>>;
