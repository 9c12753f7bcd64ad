//! The core formula arena.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ap::{Ap, ApUniverse};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceVar(pub u32);

impl TraceVar {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetVar(pub u32);

impl SetVar {
    pub const SYS: SetVar = SetVar(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// `forall p1 in X1. ... forall pn in Xn. step => target_trace in target_set`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixConstraint {
    pub binders: Vec<(TraceVar, SetVar)>,
    pub step: NodeId,
    pub target_trace: TraceVar,
    pub target_set: SetVar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    True,
    False,
    Atom { ap: Ap, var: TraceVar },
    Not(NodeId),
    And(NodeId, NodeId),
    Next(NodeId),
    Prev(NodeId),
    Until(NodeId, NodeId),
    Since(NodeId, NodeId),
    ExistsTrace { var: TraceVar, set: SetVar, body: NodeId },
    ForallTrace { var: TraceVar, set: SetVar, body: NodeId },
    ExistsSet { set: SetVar, body: NodeId },
    ForallSet { set: SetVar, body: NodeId },
    Fix {
        set: SetVar,
        constraints: Vec<FixConstraint>,
        body: NodeId,
    },
}

impl Node {
    /// Direct children in pre-order (constraint steps before the body).
    pub fn children(&self) -> Vec<NodeId> {
        match self {
            Node::True | Node::False | Node::Atom { .. } => Vec::new(),
            Node::Not(x) | Node::Next(x) | Node::Prev(x) => alloc::vec![*x],
            Node::And(x, y) | Node::Until(x, y) | Node::Since(x, y) => alloc::vec![*x, *y],
            Node::ExistsTrace { body, .. }
            | Node::ForallTrace { body, .. }
            | Node::ExistsSet { body, .. }
            | Node::ForallSet { body, .. } => alloc::vec![*body],
            Node::Fix {
                constraints, body, ..
            } => constraints
                .iter()
                .map(|c| c.step)
                .chain(core::iter::once(*body))
                .collect(),
        }
    }

    pub fn is_quantifier(&self) -> bool {
        matches!(
            self,
            Node::ExistsTrace { .. }
                | Node::ForallTrace { .. }
                | Node::ExistsSet { .. }
                | Node::ForallSet { .. }
        )
    }
}

/// Facts about the subtree rooted at a node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeInfo {
    /// Trace variables occurring free, ascending.
    pub free_traces: Vec<TraceVar>,
    /// Set variables occurring free (including `sys`), ascending.
    pub free_sets: Vec<SetVar>,
    /// No `Prev` or `Since` anywhere below, constraint steps included.
    pub past_free: bool,
    /// Number of nodes in the subtree.
    pub size: usize,
}

/// A desugared formula. Node ids are dense and assigned in pre-order.
#[derive(Clone, Debug)]
pub struct Formula {
    pub(crate) nodes: Vec<Node>,
    pub(crate) info: Vec<NodeInfo>,
    pub(crate) trace_names: Vec<String>,
    pub(crate) set_names: Vec<String>,
    pub(crate) universe: ApUniverse,
}

impl PartialEq for Formula {
    /// Structural equality: same nodes and variable names.
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.trace_names == other.trace_names
            && self.set_names == other.set_names
    }
}

impl Formula {
    pub(crate) fn new(
        nodes: Vec<Node>,
        trace_names: Vec<String>,
        set_names: Vec<String>,
        universe: ApUniverse,
    ) -> Formula {
        let mut formula = Formula {
            info: Vec::new(),
            nodes,
            trace_names,
            set_names,
            universe,
        };
        formula.info = compute_info(&formula.nodes);
        formula
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn info(&self, id: NodeId) -> &NodeInfo {
        &self.info[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn universe(&self) -> &ApUniverse {
        &self.universe
    }

    pub fn trace_name(&self, var: TraceVar) -> &str {
        &self.trace_names[var.index()]
    }

    pub fn set_name(&self, var: SetVar) -> &str {
        &self.set_names[var.index()]
    }

    pub fn trace_var_count(&self) -> usize {
        self.trace_names.len()
    }

    pub fn set_var_count(&self) -> usize {
        self.set_names.len()
    }

    /// Looks up a trace variable by its (possibly renamed) name.
    pub fn trace_var(&self, name: &str) -> Option<TraceVar> {
        self.trace_names
            .iter()
            .position(|n| n == name)
            .map(|k| TraceVar(k as u32))
    }

    pub fn set_var(&self, name: &str) -> Option<SetVar> {
        self.set_names
            .iter()
            .position(|n| n == name)
            .map(|k| SetVar(k as u32))
    }

    /// True if no set quantifier or fixpoint occurs.
    pub fn is_first_order(&self) -> bool {
        !self.nodes.iter().any(|n| {
            matches!(
                n,
                Node::ExistsSet { .. } | Node::ForallSet { .. } | Node::Fix { .. }
            )
        })
    }

    pub fn has_fix(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, Node::Fix { .. }))
    }

    /// The first node (in pre-order) of the given shape, for tests and tools.
    pub fn find(&self, pred: impl Fn(&Node) -> bool) -> Option<NodeId> {
        self.ids().find(|&id| pred(self.node(id)))
    }
}

fn insert_sorted<T: Ord + Copy>(v: &mut Vec<T>, x: T) {
    if let Err(at) = v.binary_search(&x) {
        v.insert(at, x);
    }
}

fn merge<T: Ord + Copy>(into: &mut Vec<T>, from: &[T]) {
    for &x in from {
        insert_sorted(into, x);
    }
}

fn compute_info(nodes: &[Node]) -> Vec<NodeInfo> {
    let mut info = alloc::vec![NodeInfo::default(); nodes.len()];
    // Children always have larger ids than their parent.
    for k in (0..nodes.len()).rev() {
        let mut out = NodeInfo {
            past_free: true,
            size: 1,
            ..NodeInfo::default()
        };
        for child in nodes[k].children() {
            let c = &info[child.index()];
            merge(&mut out.free_traces, &c.free_traces);
            merge(&mut out.free_sets, &c.free_sets);
            out.past_free &= c.past_free;
            out.size += c.size;
        }
        match &nodes[k] {
            Node::Atom { var, .. } => insert_sorted(&mut out.free_traces, *var),
            Node::Prev(_) | Node::Since(..) => out.past_free = false,
            Node::ExistsTrace { var, set, .. } | Node::ForallTrace { var, set, .. } => {
                out.free_traces.retain(|v| v != var);
                insert_sorted(&mut out.free_sets, *set);
            }
            Node::ExistsSet { set, .. } | Node::ForallSet { set, .. } => {
                out.free_sets.retain(|s| s != set);
            }
            Node::Fix {
                set, constraints, ..
            } => {
                for c in constraints {
                    insert_sorted(&mut out.free_traces, c.target_trace);
                    for (_, s) in &c.binders {
                        insert_sorted(&mut out.free_sets, *s);
                    }
                }
                for c in constraints {
                    for (v, _) in &c.binders {
                        out.free_traces.retain(|x| x != v);
                    }
                }
                out.free_sets.retain(|s| s != set);
            }
            _ => {}
        }
        info[k] = out;
    }
    info
}
