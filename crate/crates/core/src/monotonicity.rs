//! Static monotonicity marks.
//!
//! A node marked `+` keeps being satisfied when traces are added, a node
//! marked `-` keeps being violated. The rules are syntactic: atoms carry
//! both marks, negation swaps them, the other boolean and temporal
//! connectives keep the marks common to their operands, `exists p in X`
//! keeps `+` and `forall p in X` keeps `-` only when `X` is in the context,
//! and a fixpoint adds its variable to the context of its body. The
//! context starts as `{sys}`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{BitAnd, BitOr};

use crate::syntax::{Formula, Node, NodeId, SetVar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Marks(u8);

impl Marks {
    pub const NONE: Marks = Marks(0);
    pub const PLUS: Marks = Marks(1);
    pub const MINUS: Marks = Marks(2);
    pub const BOTH: Marks = Marks(3);

    pub fn plus(self) -> bool {
        self.0 & 1 != 0
    }

    pub fn minus(self) -> bool {
        self.0 & 2 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Swaps `+` and `-`.
    pub fn swap(self) -> Marks {
        Marks((self.0 & 1) << 1 | (self.0 & 2) >> 1)
    }
}

impl BitAnd for Marks {
    type Output = Marks;
    fn bitand(self, rhs: Marks) -> Marks {
        Marks(self.0 & rhs.0)
    }
}

impl BitOr for Marks {
    type Output = Marks;
    fn bitor(self, rhs: Marks) -> Marks {
        Marks(self.0 | rhs.0)
    }
}

impl fmt::Display for Marks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match *self {
            Marks::NONE => "{}",
            Marks::PLUS => "{+}",
            Marks::MINUS => "{-}",
            _ => "{+,-}",
        })
    }
}

/// Marks of every node of one formula, indexed by node id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonMap {
    marks: Vec<Marks>,
}

impl MonMap {
    pub fn get(&self, id: NodeId) -> Marks {
        self.marks[id.index()]
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Marks)> + '_ {
        self.marks
            .iter()
            .enumerate()
            .map(|(k, m)| (NodeId(k as u32), *m))
    }
}

/// The marks derivable for `id` under the context `gamma`.
pub fn infer(formula: &Formula, id: NodeId, gamma: &[SetVar]) -> Marks {
    let mut gamma = gamma.to_vec();
    walk(formula, id, &mut gamma, &mut |_, _| {})
}

/// Marks every node, threading the context from the root.
pub fn compute_mon_map(formula: &Formula) -> MonMap {
    let mut marks = alloc::vec![Marks::NONE; formula.len()];
    let mut gamma = alloc::vec![SetVar::SYS];
    walk(formula, formula.root(), &mut gamma, &mut |id, m| {
        marks[id.index()] = m
    });
    MonMap { marks }
}

fn walk(
    formula: &Formula,
    id: NodeId,
    gamma: &mut Vec<SetVar>,
    record: &mut impl FnMut(NodeId, Marks),
) -> Marks {
    let marks = match formula.node(id) {
        Node::True | Node::False | Node::Atom { .. } => Marks::BOTH,
        Node::Not(x) => walk(formula, *x, gamma, record).swap(),
        Node::Next(x) | Node::Prev(x) => walk(formula, *x, gamma, record),
        Node::And(x, y) | Node::Until(x, y) | Node::Since(x, y) => {
            walk(formula, *x, gamma, record) & walk(formula, *y, gamma, record)
        }
        Node::ExistsTrace { set, body, .. } => {
            let body = walk(formula, *body, gamma, record);
            if gamma.contains(set) {
                body & Marks::PLUS
            } else {
                Marks::NONE
            }
        }
        Node::ForallTrace { set, body, .. } => {
            let body = walk(formula, *body, gamma, record);
            if gamma.contains(set) {
                body & Marks::MINUS
            } else {
                Marks::NONE
            }
        }
        Node::ExistsSet { body, .. } | Node::ForallSet { body, .. } => {
            walk(formula, *body, gamma, record)
        }
        Node::Fix {
            set,
            constraints,
            body,
        } => {
            gamma.push(*set);
            for c in constraints {
                walk(formula, c.step, gamma, record);
            }
            let marks = walk(formula, *body, gamma, record);
            gamma.pop();
            marks
        }
    };
    record(id, marks);
    marks
}
