//! Formula language: parsing, desugaring, printing and well-formedness.
//!
//! Text is parsed into a [`Surface`] tree, which [`lower`] turns into a
//! [`Formula`]: an arena of core nodes with derived operators expanded,
//! binders alpha-renamed apart and variables resolved to dense ids.

mod formula;
mod lexer;
mod lower;
mod parser;
mod print;
pub mod surface;
mod wf;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

pub use formula::{FixConstraint, Formula, Node, NodeId, NodeInfo, SetVar, TraceVar};
pub use lower::lower;
pub use parser::parse;
pub use print::print_surface;
pub use surface::Surface;
pub use wf::{check_well_formed, Diagnostic, DiagnosticKind};

use crate::ap::{ApError, ApUniverse};

/// The reserved set variable denoting the whole observed trace set.
pub const SYS: &str = "sys";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{at}: unknown token `{token}`")]
    UnknownToken { token: String, at: Position },
    #[error("{at}: expected {expected}, found {found}")]
    Unexpected {
        found: String,
        expected: String,
        at: Position,
    },
    #[error("{at}: unbalanced parentheses")]
    Unbalanced { at: Position },
    #[error("{at}: `sys` is reserved and cannot be bound")]
    ReservedName { at: Position },
    #[error("trace equality needs a nonempty set of atomic propositions")]
    NoApUniverse,
    #[error(transparent)]
    Ap(#[from] ApError),
    #[error("ill-formed formula: {}", DiagnosticList(.0))]
    IllFormed(Vec<Diagnostic>),
}

struct DiagnosticList<'a>(&'a [Diagnostic]);

impl fmt::Display for DiagnosticList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses `text`, adds its propositions to `universe`, desugars and checks
/// well-formedness.
///
/// The universe should already contain every proposition of the traces
/// the formula will be evaluated on: `true` and `!=` expand over it.
pub fn compile(text: &str, universe: &mut ApUniverse) -> Result<Formula, SyntaxError> {
    let surface = parse(text)?;
    compile_surface(&surface, universe)
}

pub fn compile_surface(
    surface: &Surface,
    universe: &mut ApUniverse,
) -> Result<Formula, SyntaxError> {
    for ap in surface.atoms() {
        universe.intern(&ap)?;
    }
    let formula = lower(surface, universe)?;
    let diagnostics = check_well_formed(&formula);
    if diagnostics.is_empty() {
        Ok(formula)
    } else {
        Err(SyntaxError::IllFormed(diagnostics))
    }
}
