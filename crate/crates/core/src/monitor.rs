//! The sequential monitor: traces arrive one at a time and each arrival
//! is answered with a verdict.
//!
//! A verdict is definitive only when the root's marks back it: `Sat`
//! needs `+` and a true check, `Unsat` needs `-` and a false check.
//! After a definitive verdict the monitor accepts no more traces.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::ap::ApSet;
use crate::eval::{Counters, EvalError, Evaluator, Options};
use crate::monotonicity::Marks;
use crate::syntax::Formula;
use crate::traces::{Insertion, LengthPolicy, TraceError, TraceStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
    Inconclusive,
}

impl Verdict {
    pub fn from_check(result: bool, marks: Marks) -> Verdict {
        match (result, marks.plus(), marks.minus()) {
            (true, true, _) => Verdict::Sat,
            (false, _, true) => Verdict::Unsat,
            _ => Verdict::Inconclusive,
        }
    }

    pub fn is_final(self) -> bool {
        self != Verdict::Inconclusive
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArrivalRecord {
    /// 1-based arrival number.
    pub index: usize,
    pub verdict: Verdict,
    /// Truth value on the store after this arrival.
    pub check_result: bool,
    pub duplicate: bool,
    /// Cumulative counters after this arrival.
    pub counters: Counters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FinalReport {
    pub verdict: Verdict,
    /// Truth value on the final store, justified by a mark or not.
    pub last_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("the monitor has already finished")]
    Finished,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub struct Monitor {
    evaluator: Evaluator,
    store: TraceStore,
    finished: bool,
    log: Vec<ArrivalRecord>,
}

impl Monitor {
    pub fn new(formula: Formula, policy: LengthPolicy, options: Options) -> Monitor {
        let store = TraceStore::new(formula.universe().clone(), policy);
        Monitor::with_store(formula, store, options)
    }

    /// Starts from an empty store configured by the caller.
    pub fn with_store(formula: Formula, store: TraceStore, options: Options) -> Monitor {
        assert!(store.is_empty(), "a monitor starts from an empty store");
        Monitor {
            evaluator: Evaluator::new(formula, options),
            store,
            finished: false,
            log: Vec::new(),
        }
    }

    pub fn root_marks(&self) -> Marks {
        let f = self.evaluator.formula();
        self.evaluator.mon_map().get(f.root())
    }

    /// True if no verdict other than inconclusive can ever be reported.
    pub fn never_decides(&self) -> bool {
        self.root_marks().is_empty()
    }

    pub fn formula(&self) -> &Formula {
        self.evaluator.formula()
    }

    pub fn store(&self) -> &TraceStore {
        &self.store
    }

    pub fn counters(&self) -> Counters {
        self.evaluator.counters()
    }

    pub fn log(&self) -> &[ArrivalRecord] {
        &self.log
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn feed(&mut self, steps: &[ApSet]) -> Result<Verdict, MonitorError> {
        if self.finished {
            return Err(MonitorError::Finished);
        }
        let insertion = self.store.insert(steps)?;
        let check_result = match (insertion, self.log.last()) {
            (Insertion::Duplicate(_), Some(last)) => last.check_result,
            _ => self.evaluator.check(&self.store)?,
        };
        let verdict = Verdict::from_check(check_result, self.root_marks());
        self.log.push(ArrivalRecord {
            index: self.log.len() + 1,
            verdict,
            check_result,
            duplicate: !insertion.is_added(),
            counters: self.evaluator.counters(),
        });
        self.finished = verdict.is_final();
        Ok(verdict)
    }

    /// Feeds a trace written as `"s;d;r"`.
    pub fn feed_text(&mut self, text: &str) -> Result<Verdict, MonitorError> {
        let word = self.store.universe().word(text).map_err(TraceError::from)?;
        self.feed(&word)
    }

    /// Ends the stream. Without any arrival the verdict is inconclusive.
    pub fn finish(&mut self) -> Result<FinalReport, MonitorError> {
        self.finished = true;
        match self.log.last() {
            Some(last) => Ok(FinalReport {
                verdict: last.verdict,
                last_check: last.check_result,
            }),
            None => Ok(FinalReport {
                verdict: Verdict::Inconclusive,
                last_check: self.evaluator.check(&self.store)?,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::ApUniverse;
    use crate::bench::sender_receiver;
    use crate::syntax::compile;

    fn monitor(text: &str, aps: &[&str], options: Options) -> Monitor {
        let mut u = ApUniverse::from_names(aps).unwrap();
        Monitor::new(compile(text, &mut u).unwrap(), LengthPolicy::Pad, options)
    }

    #[test]
    fn ck_reports_unsat_on_fourth_trace() {
        for options in Options::combinations() {
            let mut m = monitor(sender_receiver::CK, &sender_receiver::APS, options);
            assert_eq!(m.root_marks(), Marks::MINUS);
            let verdicts: Vec<_> = ["s;r;r", "s;d;r", "s;s;r", "s;s;d"]
                .iter()
                .map(|t| m.feed_text(t).unwrap())
                .collect();
            assert_eq!(
                verdicts,
                [Verdict::Inconclusive, Verdict::Inconclusive, Verdict::Inconclusive, Verdict::Unsat]
            );
            assert_eq!(m.feed_text("s;s;s"), Err(MonitorError::Finished));
            assert_eq!(
                m.finish().unwrap(),
                FinalReport {
                    verdict: Verdict::Unsat,
                    last_check: false
                }
            );
        }
    }

    #[test]
    fn witness_arrival_gives_sat() {
        let mut m = monitor("exists p in sys. a[p]", &["a"], Options::all());
        assert_eq!(m.feed_text(";;").unwrap(), Verdict::Inconclusive);
        assert_eq!(m.feed_text("a;;").unwrap(), Verdict::Sat);
        assert!(m.is_finished());
    }

    #[test]
    fn unmarked_root_never_decides() {
        let m = monitor("forall X. exists p in X. a[p]", &["a"], Options::all());
        assert!(m.never_decides());
    }

    #[test]
    fn eventual_knowledge_stays_inconclusive() {
        let mut m = monitor(sender_receiver::EVENTUAL_KNOWLEDGE, &sender_receiver::APS, Options::all());
        for t in sender_receiver::traces(5) {
            assert_eq!(m.feed(&t).unwrap(), Verdict::Inconclusive);
        }
        assert_eq!(
            m.finish().unwrap(),
            FinalReport {
                verdict: Verdict::Inconclusive,
                last_check: true
            }
        );
    }

    #[test]
    fn duplicates_repeat_the_previous_verdict() {
        let mut m = monitor("forall p in sys. a[p]", &["a"], Options::all());
        m.feed_text("a;a").unwrap();
        let calls = m.counters().check_calls;
        assert_eq!(m.feed_text("a;a").unwrap(), Verdict::Inconclusive);
        assert_eq!(m.counters().check_calls, calls);
        assert!(m.log()[1].duplicate);
        assert_eq!(m.log()[1].index, 2);
    }

    #[test]
    fn empty_stream() {
        let mut m = monitor("forall p in sys. a[p]", &["a"], Options::all());
        assert_eq!(
            m.finish().unwrap(),
            FinalReport {
                verdict: Verdict::Inconclusive,
                last_check: true
            }
        );
        assert_eq!(m.feed_text("a"), Err(MonitorError::Finished));
    }

    #[test]
    fn malformed_trace_is_an_error() {
        let mut m = monitor("exists p in sys. a[p]", &["a"], Options::all());
        assert!(matches!(m.feed_text("b"), Err(MonitorError::Trace(_))));
        assert!(matches!(m.feed(&[]), Err(MonitorError::Trace(TraceError::Empty))));
    }
}
