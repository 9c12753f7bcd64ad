//! Monitoring second-order hyperproperties over finite traces.
//!
//! The crate is `no_std` (it needs `alloc`). It contains the formula
//! language ([`syntax`]), the growing trace set ([`traces`]), the static
//! monotonicity analysis ([`monotonicity`]), the incremental model checker
//! ([`eval`]), the sequential monitor loop ([`monitor`]), the bounded
//! unfolding of set quantifiers ([`unfold`]), a cache-free reference
//! semantics ([`oracle`]) and the benchmark families ([`bench`]).
//!
//! File formats, the command-line tool and wall-clock measurements live in
//! the `somon` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ap;
pub mod bench;
pub mod eval;
pub mod idset;
pub mod monitor;
pub mod monotonicity;
pub mod oracle;
pub mod random;
pub mod syntax;
pub mod traces;
pub mod unfold;

pub use ap::{Ap, ApSet, ApUniverse};
pub use eval::{Counters, EvalContext, EvalError, Evaluator, Options, SetKind};
pub use idset::{IdSet, TraceId};
pub use monitor::{ArrivalRecord, FinalReport, Monitor, MonitorError, Verdict};
pub use monotonicity::{compute_mon_map, infer, Marks, MonMap};
pub use syntax::{compile, Formula, NodeId, SetVar, SyntaxError, TraceVar};
pub use traces::{Insertion, LengthPolicy, Trace, TraceError, TraceStore};
