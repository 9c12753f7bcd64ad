//! Bounded unfolding of set quantifiers into trace quantifiers.
//!
//! `exists X. φ` becomes `exists u1 in sys. ... exists ub in sys. φ'`, and
//! a trace quantifier over `X` becomes a disjunction (`exists`) or
//! conjunction (`forall`) over `u1..ub`. Quantifiers over `sys` are kept.
//! On a store of at most `b` traces the result agrees with the input
//! whenever no set quantifier is decided by the empty set alone, since
//! `u1..ub` always denote a nonempty set.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::oracle::{Oracle, OracleError};
use crate::syntax::surface::{BinaryOp, Quantifier, UnaryOp};
use crate::syntax::{compile_surface, Formula, Node, NodeId, Surface, SyntaxError, SYS};
use crate::traces::TraceStore;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("fixpoint unfolding unsupported")]
    Fixpoint,
    #[error("the bound must be at least 1")]
    ZeroBound,
    #[error("the store has {size} traces, more than the bound {bound}")]
    TooManyTraces { size: usize, bound: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

struct Unfolder<'a> {
    formula: &'a Formula,
    bound: usize,
    taken: BTreeSet<String>,
    next: usize,
    /// Fresh trace names per set variable.
    sets: Vec<Option<Vec<String>>>,
    /// Current name of each trace variable.
    traces: Vec<String>,
}

impl Unfolder<'_> {
    fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("u{}", self.next);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    fn node(&mut self, id: NodeId) -> Surface {
        let f = self.formula;
        match f.node(id) {
            Node::True => Surface::True,
            Node::False => Surface::False,
            Node::Atom { ap, var } => Surface::atom(f.universe().name(*ap), &self.traces[var.index()]),
            Node::Not(x) => Surface::unary(UnaryOp::Not, self.node(*x)),
            Node::Next(x) => Surface::unary(UnaryOp::Next, self.node(*x)),
            Node::Prev(x) => Surface::unary(UnaryOp::Prev, self.node(*x)),
            Node::And(x, y) => self.binary(BinaryOp::And, *x, *y),
            Node::Until(x, y) => self.binary(BinaryOp::Until, *x, *y),
            Node::Since(x, y) => self.binary(BinaryOp::Since, *x, *y),
            Node::ExistsTrace { var, set, body } | Node::ForallTrace { var, set, body } => {
                let exists = matches!(f.node(id), Node::ExistsTrace { .. });
                match self.sets[set.index()].clone() {
                    Some(names) => {
                        let op = if exists { BinaryOp::Or } else { BinaryOp::And };
                        let previous = self.traces[var.index()].clone();
                        let mut parts = Vec::new();
                        for name in names {
                            self.traces[var.index()] = name;
                            parts.push(self.node(*body));
                        }
                        self.traces[var.index()] = previous;
                        parts
                            .into_iter()
                            .reduce(|acc, x| Surface::binary(op, acc, x))
                            .expect("the bound is positive")
                    }
                    None => {
                        let q = if exists { Quantifier::Exists } else { Quantifier::Forall };
                        let body = self.node(*body);
                        Surface::trace_quant(q, f.trace_name(*var), f.set_name(*set), body)
                    }
                }
            }
            Node::ExistsSet { set, body } | Node::ForallSet { set, body } => {
                let q = if matches!(f.node(id), Node::ExistsSet { .. }) {
                    Quantifier::Exists
                } else {
                    Quantifier::Forall
                };
                let names: Vec<String> = (0..self.bound).map(|_| self.fresh()).collect();
                let previous = self.sets[set.index()].replace(names.clone());
                let mut out = self.node(*body);
                self.sets[set.index()] = previous;
                for name in names.iter().rev() {
                    out = Surface::trace_quant(q, name, SYS, out);
                }
                out
            }
            Node::Fix { .. } => unreachable!("checked before unfolding"),
        }
    }

    fn binary(&mut self, op: BinaryOp, x: NodeId, y: NodeId) -> Surface {
        let x = self.node(x);
        let y = self.node(y);
        Surface::binary(op, x, y)
    }
}

/// The unfolded formula in surface form.
pub fn unfold(formula: &Formula, bound: usize) -> Result<Surface, UnfoldError> {
    if bound == 0 {
        return Err(UnfoldError::ZeroBound);
    }
    if formula.has_fix() {
        return Err(UnfoldError::Fixpoint);
    }
    let traces: Vec<String> = (0..formula.trace_var_count() as u32)
        .map(|v| formula.trace_name(crate::syntax::TraceVar(v)).to_string())
        .collect();
    let mut taken: BTreeSet<String> = traces.iter().cloned().collect();
    taken.extend((0..formula.set_var_count() as u32).map(|s| formula.set_name(crate::syntax::SetVar(s)).to_string()));
    let mut u = Unfolder {
        formula,
        bound,
        taken,
        next: 0,
        sets: alloc::vec![None; formula.set_var_count()],
        traces,
    };
    Ok(u.node(formula.root()))
}

/// The unfolded formula, compiled over the input's propositions.
pub fn unfold_formula(formula: &Formula, bound: usize) -> Result<Formula, UnfoldError> {
    let surface = unfold(formula, bound)?;
    let mut universe = formula.universe().clone();
    Ok(compile_surface(&surface, &mut universe)?)
}

/// Trace quantifiers over set-quantified variables: the ones that unfold
/// into `b`-fold disjunctions or conjunctions.
pub fn unfolded_quantifiers(formula: &Formula) -> usize {
    let quantified: BTreeSet<_> = formula
        .ids()
        .filter_map(|id| match formula.node(id) {
            Node::ExistsSet { set, .. } | Node::ForallSet { set, .. } => Some(*set),
            _ => None,
        })
        .collect();
    formula
        .ids()
        .filter(|&id| match formula.node(id) {
            Node::ExistsTrace { set, .. } | Node::ForallTrace { set, .. } => quantified.contains(set),
            _ => false,
        })
        .count()
}

/// Largest possible size of the unfolded surface formula: each node is
/// copied at most `b^d` times and each copy yields at most `b` nodes.
pub fn size_bound(formula: &Formula, bound: usize) -> usize {
    let d = unfolded_quantifiers(formula) as u32;
    formula.len().saturating_mul(bound.saturating_pow(d + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disagreement {
    /// Restricting set quantifiers to nonempty sets reproduces the
    /// unfolded result.
    EmptySetWitness,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agree(bool),
    Disagree {
        original: bool,
        unfolded: bool,
        class: Disagreement,
    },
}

/// Evaluates `formula` and its unfolding on `store` with the oracle.
pub fn compare(formula: &Formula, bound: usize, store: &TraceStore) -> Result<Agreement, UnfoldError> {
    if store.len() > bound {
        return Err(UnfoldError::TooManyTraces {
            size: store.len(),
            bound,
        });
    }
    let unfolded = unfold_formula(formula, bound)?;
    let original = Oracle::new(formula, store).check()?;
    let result = Oracle::new(&unfolded, store).check()?;
    if original == result {
        return Ok(Agreement::Agree(original));
    }
    let nonempty = Oracle::new(formula, store).nonempty_sets(true).check()?;
    let class = if nonempty == result {
        Disagreement::EmptySetWitness
    } else {
        Disagreement::Unclassified
    };
    Ok(Agreement::Disagree {
        original,
        unfolded: result,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::ApUniverse;
    use crate::syntax::{compile, print_surface};
    use crate::traces::LengthPolicy;

    fn formula(text: &str) -> Formula {
        let mut u = ApUniverse::from_names(["a"]).unwrap();
        compile(text, &mut u).unwrap()
    }

    fn store(traces: &[&str]) -> TraceStore {
        let mut s = TraceStore::new(ApUniverse::from_names(["a"]).unwrap(), LengthPolicy::Pad);
        for t in traces {
            s.insert_text(t).unwrap();
        }
        s
    }

    #[test]
    fn set_quantifier_becomes_trace_quantifiers() {
        let f = formula("exists X. forall p in X. a[p]");
        assert_eq!(
            print_surface(&unfold(&f, 2).unwrap()),
            "(exists u1 in sys. (exists u2 in sys. (a[u1] & a[u2])))"
        );
    }

    #[test]
    fn sys_quantifiers_are_kept() {
        let f = formula("forall p in sys. a[p]");
        assert_eq!(print_surface(&unfold(&f, 1).unwrap()), "(forall p in sys. a[p])");
    }

    #[test]
    fn fixpoints_are_rejected() {
        let f = formula("fix(X, forall q in sys. a[q] => q in X). exists p in X. a[p]");
        assert_eq!(unfold(&f, 2), Err(UnfoldError::Fixpoint));
        assert_eq!(UnfoldError::Fixpoint.to_string(), "fixpoint unfolding unsupported");
        assert_eq!(unfold(&formula("exists p in sys. a[p]"), 0), Err(UnfoldError::ZeroBound));
    }

    #[test]
    fn fresh_names_avoid_input_names() {
        let f = formula("exists u1 in sys. exists X. exists p in X. a[p] & a[u1]");
        let text = print_surface(&unfold(&f, 2).unwrap());
        assert_eq!(
            text,
            "(exists u1 in sys. (exists u2 in sys. (exists u3 in sys. ((a[u2] & a[u1]) | (a[u3] & a[u1])))))"
        );
    }

    #[test]
    fn witness_set_agrees() {
        let f = formula("exists X. exists p in X. a[p]");
        assert_eq!(compare(&f, 2, &store(&["a;a"])).unwrap(), Agreement::Agree(true));
    }

    #[test]
    fn empty_witness_is_classified() {
        let f = formula("exists X. forall p in X. false");
        assert_eq!(
            compare(&f, 2, &store(&["a", ""])).unwrap(),
            Agreement::Disagree {
                original: true,
                unfolded: false,
                class: Disagreement::EmptySetWitness
            }
        );
        assert!(matches!(
            compare(&f, 1, &store(&["a", ""])),
            Err(UnfoldError::TooManyTraces { size: 2, bound: 1 })
        ));
    }

    #[test]
    fn size_bound_counts_unfolded_quantifiers() {
        let f = formula("exists X. exists p in X. exists r in X. a[p] & a[r]");
        assert_eq!(unfolded_quantifiers(&f), 2);
        let out = unfold(&f, 3).unwrap();
        assert_eq!(out.size(), 38);
        assert!(out.size() > f.len() * 3);
        assert!(out.size() <= size_bound(&f, 3));
    }
}
