//! Desugaring and alpha-renaming of surface trees into core formulas.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::formula::{FixConstraint, Formula, Node, NodeId, SetVar, TraceVar};
use super::surface::{BinaryOp, Quantifier, Surface, UnaryOp};
use super::{SyntaxError, SYS};
use crate::ap::ApUniverse;

/// Lowers a surface tree to a core formula over `universe`.
///
/// Every binder gets its own variable; a binder whose name is already
/// taken is renamed to `name_k`. Names that are never bound still get
/// variables so that [`super::check_well_formed`] can report them.
pub fn lower(surface: &Surface, universe: &ApUniverse) -> Result<Formula, SyntaxError> {
    let mut reserved = surface.names();
    reserved.insert(SYS.to_owned());
    let mut lowerer = Lowerer {
        universe,
        nodes: Vec::new(),
        trace_names: Vec::new(),
        set_names: alloc::vec![SYS.to_owned()],
        reserved,
        taken: BTreeSet::from([SYS.to_owned()]),
        trace_scope: Vec::new(),
        set_scope: Vec::new(),
        free_traces: BTreeMap::new(),
        free_sets: BTreeMap::new(),
    };
    lowerer.lower(surface)?;
    Ok(Formula::new(
        lowerer.nodes,
        lowerer.trace_names,
        lowerer.set_names,
        universe.clone(),
    ))
}

struct Lowerer<'u> {
    universe: &'u ApUniverse,
    nodes: Vec<Node>,
    trace_names: Vec<String>,
    set_names: Vec<String>,
    reserved: BTreeSet<String>,
    taken: BTreeSet<String>,
    trace_scope: Vec<(String, TraceVar)>,
    set_scope: Vec<(String, SetVar)>,
    free_traces: BTreeMap<String, TraceVar>,
    free_sets: BTreeMap<String, SetVar>,
}

impl Lowerer<'_> {
    fn fresh_name(&mut self, name: &str) -> String {
        if self.taken.insert(name.to_owned()) {
            return name.to_owned();
        }
        let mut k = 1;
        loop {
            let candidate = format!("{name}_{k}");
            if !self.reserved.contains(&candidate) && !self.taken.contains(&candidate) {
                self.taken.insert(candidate.clone());
                return candidate;
            }
            k += 1;
        }
    }

    fn new_trace_var(&mut self, name: &str) -> TraceVar {
        let name = self.fresh_name(name);
        self.trace_names.push(name);
        TraceVar(self.trace_names.len() as u32 - 1)
    }

    fn new_set_var(&mut self, name: &str) -> SetVar {
        let name = self.fresh_name(name);
        self.set_names.push(name);
        SetVar(self.set_names.len() as u32 - 1)
    }

    fn trace(&mut self, name: &str) -> TraceVar {
        if let Some((_, v)) = self.trace_scope.iter().rev().find(|(n, _)| n == name) {
            return *v;
        }
        if let Some(v) = self.free_traces.get(name) {
            return *v;
        }
        let v = self.new_trace_var(name);
        self.free_traces.insert(name.to_owned(), v);
        v
    }

    fn set(&mut self, name: &str) -> SetVar {
        if let Some((_, v)) = self.set_scope.iter().rev().find(|(n, _)| n == name) {
            return *v;
        }
        if name == SYS {
            return SetVar::SYS;
        }
        if let Some(v) = self.free_sets.get(name) {
            return *v;
        }
        let v = self.new_set_var(name);
        self.free_sets.insert(name.to_owned(), v);
        v
    }

    fn reserve(&mut self) -> NodeId {
        self.nodes.push(Node::True);
        NodeId(self.nodes.len() as u32 - 1)
    }

    fn put(&mut self, id: NodeId, node: Node) -> NodeId {
        self.nodes[id.index()] = node;
        id
    }

    fn leaf(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() as u32 - 1)
    }

    fn not(&mut self, x: impl FnOnce(&mut Self) -> Result<NodeId, SyntaxError>) -> Result<NodeId, SyntaxError> {
        let id = self.reserve();
        let child = x(self)?;
        Ok(self.put(id, Node::Not(child)))
    }

    /// `a[p] | !a[p]` for the least proposition and the innermost trace
    /// variable; the core constant when either is missing.
    fn lower_true(&mut self) -> Result<NodeId, SyntaxError> {
        let var = self.trace_scope.last().map(|(name, _)| name.clone());
        match (self.universe.least(), var) {
            (Some(ap), Some(var)) => {
                let atom = Surface::atom(self.universe.name(ap), &var);
                self.lower(&Surface::or(atom.clone(), Surface::not(atom)))
            }
            _ => Ok(self.leaf(Node::True)),
        }
    }

    /// `!x | y`, written as `!(!!x & !y)`.
    fn lower_implies(&mut self, x: &Surface, y: &Surface) -> Result<NodeId, SyntaxError> {
        self.not(|l| {
            let and = l.reserve();
            let lhs = l.not(|l| l.not(|l| l.lower(x)))?;
            let rhs = l.not(|l| l.lower(y))?;
            Ok(l.put(and, Node::And(lhs, rhs)))
        })
    }

    fn lower_binary(
        &mut self,
        x: &Surface,
        y: &Surface,
        make: fn(NodeId, NodeId) -> Node,
    ) -> Result<NodeId, SyntaxError> {
        let id = self.reserve();
        let lhs = self.lower(x)?;
        let rhs = self.lower(y)?;
        Ok(self.put(id, make(lhs, rhs)))
    }

    /// `true U x` or `true S x`.
    fn lower_eventually(&mut self, x: &Surface, past: bool) -> Result<NodeId, SyntaxError> {
        let id = self.reserve();
        let t = self.lower_true()?;
        let c = self.lower(x)?;
        Ok(self.put(id, if past { Node::Since(t, c) } else { Node::Until(t, c) }))
    }

    fn trace_inequality(&self, left: &str, right: &str) -> Result<Surface, SyntaxError> {
        let differs = self
            .universe
            .sorted()
            .map(|ap| {
                let name = self.universe.name(ap);
                Surface::not(Surface::iff(Surface::atom(name, left), Surface::atom(name, right)))
            })
            .reduce(Surface::or)
            .ok_or(SyntaxError::NoApUniverse)?;
        Ok(Surface::unary(UnaryOp::Eventually, differs))
    }

    fn lower(&mut self, s: &Surface) -> Result<NodeId, SyntaxError> {
        match s {
            Surface::True => self.lower_true(),
            Surface::False => self.not(|l| l.lower_true()),
            Surface::Atom { ap, var } => {
                let ap = self.universe.lookup(ap)?;
                let var = self.trace(var);
                Ok(self.leaf(Node::Atom { ap, var }))
            }
            Surface::Unary(op, x) => match op {
                UnaryOp::Not => self.not(|l| l.lower(x)),
                UnaryOp::Next | UnaryOp::Prev => {
                    let id = self.reserve();
                    let c = self.lower(x)?;
                    let node = if *op == UnaryOp::Next { Node::Next(c) } else { Node::Prev(c) };
                    Ok(self.put(id, node))
                }
                UnaryOp::Eventually => self.lower_eventually(x, false),
                UnaryOp::Once => self.lower_eventually(x, true),
                UnaryOp::Globally | UnaryOp::Historically => {
                    let past = *op == UnaryOp::Historically;
                    let negated = Surface::not((**x).clone());
                    self.not(|l| l.lower_eventually(&negated, past))
                }
            },
            Surface::Binary(op, x, y) => match op {
                BinaryOp::And => self.lower_binary(x, y, Node::And),
                BinaryOp::Until => self.lower_binary(x, y, Node::Until),
                BinaryOp::Since => self.lower_binary(x, y, Node::Since),
                BinaryOp::Or => self.not(|l| {
                    let and = l.reserve();
                    let lhs = l.not(|l| l.lower(x))?;
                    let rhs = l.not(|l| l.lower(y))?;
                    Ok(l.put(and, Node::And(lhs, rhs)))
                }),
                BinaryOp::Implies => self.lower_implies(x, y),
                BinaryOp::Iff => {
                    let id = self.reserve();
                    let lhs = self.lower_implies(x, y)?;
                    let rhs = self.lower_implies(y, x)?;
                    Ok(self.put(id, Node::And(lhs, rhs)))
                }
            },
            Surface::TraceEq {
                left,
                right,
                negated,
            } => {
                let inequality = self.trace_inequality(left, right)?;
                if *negated {
                    self.lower(&inequality)
                } else {
                    self.lower(&Surface::not(inequality))
                }
            }
            Surface::TraceQuant { q, var, set, body } => {
                let id = self.reserve();
                let set = self.set(set);
                let var_id = self.new_trace_var(var);
                self.trace_scope.push((var.clone(), var_id));
                let body = self.lower(body);
                self.trace_scope.pop();
                let body = body?;
                let node = match q {
                    Quantifier::Exists => Node::ExistsTrace { var: var_id, set, body },
                    Quantifier::Forall => Node::ForallTrace { var: var_id, set, body },
                };
                Ok(self.put(id, node))
            }
            Surface::SetQuant { q, set, body } => {
                let id = self.reserve();
                let set_id = self.new_set_var(set);
                self.set_scope.push((set.clone(), set_id));
                let body = self.lower(body);
                self.set_scope.pop();
                let body = body?;
                let node = match q {
                    Quantifier::Exists => Node::ExistsSet { set: set_id, body },
                    Quantifier::Forall => Node::ForallSet { set: set_id, body },
                };
                Ok(self.put(id, node))
            }
            Surface::Fix {
                set,
                constraints,
                body,
            } => {
                let id = self.reserve();
                let set_id = self.new_set_var(set);
                self.set_scope.push((set.clone(), set_id));
                let result = self.lower_fix(set_id, constraints, body);
                self.set_scope.pop();
                let (constraints, body) = result?;
                Ok(self.put(
                    id,
                    Node::Fix {
                        set: set_id,
                        constraints,
                        body,
                    },
                ))
            }
        }
    }

    fn lower_fix(
        &mut self,
        _set: SetVar,
        constraints: &[super::surface::SurfaceConstraint],
        body: &Surface,
    ) -> Result<(Vec<FixConstraint>, NodeId), SyntaxError> {
        let mut lowered = Vec::with_capacity(constraints.len());
        for c in constraints {
            let depth = self.trace_scope.len();
            let mut binders = Vec::with_capacity(c.binders.len());
            for (var, set) in &c.binders {
                let set = self.set(set);
                let var_id = self.new_trace_var(var);
                self.trace_scope.push((var.clone(), var_id));
                binders.push((var_id, set));
            }
            let step = self.lower(&c.step);
            let target_trace = self.trace(&c.target_trace);
            let target_set = self.set(&c.target_set);
            self.trace_scope.truncate(depth);
            lowered.push(FixConstraint {
                binders,
                step: step?,
                target_trace,
                target_set,
            });
        }
        let body = self.lower(body)?;
        Ok((lowered, body))
    }
}
