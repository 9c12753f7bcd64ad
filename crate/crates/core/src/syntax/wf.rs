//! Closedness and the well-formedness rules for fixpoint constraints.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::formula::{Formula, Node, NodeId, SetVar, TraceVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// A trace variable is used outside every binder for it.
    UnboundTrace,
    /// A set variable other than `sys` is used outside every binder for it.
    UnboundSet,
    /// Rule (1): a step formula uses a trace variable that is neither
    /// bound outside the fixpoint nor one of the constraint's binders.
    StepVariable,
    /// Rule (2): a binder ranges over a set that is neither bound outside
    /// nor the fixpoint variable.
    BinderSet,
    /// Rule (3): the target trace is neither bound outside nor a binder.
    TargetTrace,
    /// The constraint adds to a set other than the fixpoint variable.
    TargetSet,
    /// A step formula contains a quantifier or a fixpoint.
    StepNotQuantifierFree,
    /// `sys` is bound by a quantifier or fixpoint.
    ReservedBinder,
    /// The same variable is bound twice.
    DuplicateBinder,
}

impl DiagnosticKind {
    /// The numbered constraint rule this diagnostic cites, if any.
    pub fn rule(self) -> Option<u8> {
        match self {
            DiagnosticKind::StepVariable => Some(1),
            DiagnosticKind::BinderSet => Some(2),
            DiagnosticKind::TargetTrace => Some(3),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub node: NodeId,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind.rule() {
            Some(rule) => write!(f, "rule ({rule}): {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Returns every violation found; an empty list means well-formed.
pub fn check_well_formed(formula: &Formula) -> Vec<Diagnostic> {
    let mut checker = Checker {
        formula,
        traces: Vec::new(),
        sets: alloc::vec![SetVar::SYS],
        seen_traces: alloc::vec![false; formula.trace_var_count()],
        seen_sets: alloc::vec![false; formula.set_var_count()],
        out: Vec::new(),
    };
    checker.walk(formula.root());
    checker.out
}

struct Checker<'f> {
    formula: &'f Formula,
    traces: Vec<TraceVar>,
    sets: Vec<SetVar>,
    seen_traces: Vec<bool>,
    seen_sets: Vec<bool>,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, kind: DiagnosticKind, node: NodeId, message: String) {
        self.out.push(Diagnostic {
            kind,
            node,
            message,
        });
    }

    fn bind_trace(&mut self, var: TraceVar, node: NodeId) {
        if core::mem::replace(&mut self.seen_traces[var.index()], true) {
            let name = self.formula.trace_name(var);
            self.report(
                DiagnosticKind::DuplicateBinder,
                node,
                format!("trace variable `{name}` is bound twice"),
            );
        }
        self.traces.push(var);
    }

    fn bind_set(&mut self, set: SetVar, node: NodeId) {
        if set == SetVar::SYS {
            self.report(
                DiagnosticKind::ReservedBinder,
                node,
                "`sys` cannot be bound".into(),
            );
        } else if core::mem::replace(&mut self.seen_sets[set.index()], true) {
            let name = self.formula.set_name(set);
            self.report(
                DiagnosticKind::DuplicateBinder,
                node,
                format!("set variable `{name}` is bound twice"),
            );
        }
        self.sets.push(set);
    }

    fn check_set(&mut self, set: SetVar, node: NodeId) {
        if !self.sets.contains(&set) {
            let name = self.formula.set_name(set);
            self.report(
                DiagnosticKind::UnboundSet,
                node,
                format!("set variable `{name}` is not bound"),
            );
        }
    }

    fn walk(&mut self, id: NodeId) {
        let formula = self.formula;
        match formula.node(id) {
            Node::True | Node::False => {}
            Node::Atom { var, .. } => {
                if !self.traces.contains(var) {
                    let name = formula.trace_name(*var);
                    self.report(
                        DiagnosticKind::UnboundTrace,
                        id,
                        format!("trace variable `{name}` is not bound"),
                    );
                }
            }
            Node::Not(x) | Node::Next(x) | Node::Prev(x) => self.walk(*x),
            Node::And(x, y) | Node::Until(x, y) | Node::Since(x, y) => {
                self.walk(*x);
                self.walk(*y);
            }
            Node::ExistsTrace { var, set, body } | Node::ForallTrace { var, set, body } => {
                self.check_set(*set, id);
                self.bind_trace(*var, id);
                self.walk(*body);
                self.traces.pop();
            }
            Node::ExistsSet { set, body } | Node::ForallSet { set, body } => {
                self.bind_set(*set, id);
                self.walk(*body);
                self.sets.pop();
            }
            Node::Fix {
                set,
                constraints,
                body,
            } => {
                let x = *set;
                self.bind_set(x, id);
                for c in constraints {
                    let outside = self.traces.len();
                    for (var, binder_set) in &c.binders {
                        if !self.sets.contains(binder_set) {
                            let name = formula.set_name(*binder_set);
                            self.report(
                                DiagnosticKind::BinderSet,
                                id,
                                format!("binder set `{name}` is neither bound outside nor the fixpoint variable"),
                            );
                        }
                        self.bind_trace(*var, id);
                    }
                    self.check_step(c.step);
                    if !self.traces.contains(&c.target_trace) {
                        let name = formula.trace_name(c.target_trace);
                        self.report(
                            DiagnosticKind::TargetTrace,
                            id,
                            format!("target trace `{name}` is neither bound outside nor a binder"),
                        );
                    }
                    if c.target_set != x {
                        let name = formula.set_name(c.target_set);
                        let fix = formula.set_name(x);
                        self.report(
                            DiagnosticKind::TargetSet,
                            id,
                            format!("constraint targets `{name}` instead of the fixpoint variable `{fix}`"),
                        );
                    }
                    self.traces.truncate(outside);
                }
                self.walk(*body);
                self.sets.pop();
            }
        }
    }

    fn check_step(&mut self, id: NodeId) {
        let formula = self.formula;
        let node = formula.node(id);
        match node {
            Node::Atom { var, .. } => {
                if !self.traces.contains(var) {
                    let name = formula.trace_name(*var);
                    self.report(
                        DiagnosticKind::StepVariable,
                        id,
                        format!("step uses `{name}`, which is neither bound outside nor a binder"),
                    );
                }
            }
            _ if node.is_quantifier() || matches!(node, Node::Fix { .. }) => {
                self.report(
                    DiagnosticKind::StepNotQuantifierFree,
                    id,
                    "step formulas may not contain quantifiers or fixpoints".into(),
                );
            }
            _ => {
                for child in node.children() {
                    self.check_step(child);
                }
            }
        }
    }
}
