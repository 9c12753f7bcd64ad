//! Text output in the concrete grammar.
//!
//! Binary connectives and binders are always parenthesized, so printed
//! text parses back to the same tree.

use alloc::string::String;
use core::fmt::{self, Write};

use super::formula::{FixConstraint, Formula, Node, NodeId};
use super::surface::{Surface, SurfaceConstraint};

impl Formula {
    /// The subformula rooted at `id` as text.
    pub fn node_text(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.write_node(&mut out, id).expect("writing to a String cannot fail");
        out
    }

    fn write_constraint(&self, f: &mut impl Write, c: &FixConstraint) -> fmt::Result {
        for (var, set) in &c.binders {
            write!(f, "forall {} in {}. ", self.trace_name(*var), self.set_name(*set))?;
        }
        self.write_node(f, c.step)?;
        write!(
            f,
            " => {} in {}",
            self.trace_name(c.target_trace),
            self.set_name(c.target_set)
        )
    }

    fn write_node(&self, f: &mut impl Write, id: NodeId) -> fmt::Result {
        match self.node(id) {
            Node::True => f.write_str("true"),
            Node::False => f.write_str("false"),
            Node::Atom { ap, var } => {
                write!(f, "{}[{}]", self.universe.name(*ap), self.trace_name(*var))
            }
            Node::Not(x) => {
                f.write_str("!")?;
                self.write_node(f, *x)
            }
            Node::Next(x) => {
                f.write_str("X ")?;
                self.write_node(f, *x)
            }
            Node::Prev(x) => {
                f.write_str("P ")?;
                self.write_node(f, *x)
            }
            Node::And(x, y) | Node::Until(x, y) | Node::Since(x, y) => {
                let op = match self.node(id) {
                    Node::And(..) => "&",
                    Node::Until(..) => "U",
                    _ => "S",
                };
                f.write_str("(")?;
                self.write_node(f, *x)?;
                write!(f, " {op} ")?;
                self.write_node(f, *y)?;
                f.write_str(")")
            }
            Node::ExistsTrace { var, set, body } | Node::ForallTrace { var, set, body } => {
                let q = if matches!(self.node(id), Node::ExistsTrace { .. }) {
                    "exists"
                } else {
                    "forall"
                };
                write!(f, "({q} {} in {}. ", self.trace_name(*var), self.set_name(*set))?;
                self.write_node(f, *body)?;
                f.write_str(")")
            }
            Node::ExistsSet { set, body } | Node::ForallSet { set, body } => {
                let q = if matches!(self.node(id), Node::ExistsSet { .. }) {
                    "exists"
                } else {
                    "forall"
                };
                write!(f, "({q} {}. ", self.set_name(*set))?;
                self.write_node(f, *body)?;
                f.write_str(")")
            }
            Node::Fix {
                set,
                constraints,
                body,
            } => {
                write!(f, "(fix({}", self.set_name(*set))?;
                for c in constraints {
                    f.write_str(", ")?;
                    self.write_constraint(f, c)?;
                }
                f.write_str("). ")?;
                self.write_node(f, *body)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(f, self.root())
    }
}

/// Prints a surface tree, keeping derived operators.
pub fn print_surface(s: &Surface) -> String {
    let mut out = String::new();
    write_surface(&mut out, s).expect("writing to a String cannot fail");
    out
}

fn write_surface_constraint(f: &mut impl Write, c: &SurfaceConstraint) -> fmt::Result {
    for (var, set) in &c.binders {
        write!(f, "forall {var} in {set}. ")?;
    }
    write_surface(f, &c.step)?;
    write!(f, " => {} in {}", c.target_trace, c.target_set)
}

fn write_surface(f: &mut impl Write, s: &Surface) -> fmt::Result {
    match s {
        Surface::True => f.write_str("true"),
        Surface::False => f.write_str("false"),
        Surface::Atom { ap, var } => write!(f, "{ap}[{var}]"),
        Surface::Unary(op, x) => {
            f.write_str(op.symbol())?;
            if op.symbol() != "!" {
                f.write_str(" ")?;
            }
            write_surface(f, x)
        }
        Surface::Binary(op, x, y) => {
            f.write_str("(")?;
            write_surface(f, x)?;
            write!(f, " {} ", op.symbol())?;
            write_surface(f, y)?;
            f.write_str(")")
        }
        Surface::TraceQuant { q, var, set, body } => {
            write!(f, "({} {var} in {set}. ", q.keyword())?;
            write_surface(f, body)?;
            f.write_str(")")
        }
        Surface::SetQuant { q, set, body } => {
            write!(f, "({} {set}. ", q.keyword())?;
            write_surface(f, body)?;
            f.write_str(")")
        }
        Surface::Fix {
            set,
            constraints,
            body,
        } => {
            write!(f, "(fix({set}")?;
            for c in constraints {
                f.write_str(", ")?;
                write_surface_constraint(f, c)?;
            }
            f.write_str("). ")?;
            write_surface(f, body)?;
            f.write_str(")")
        }
        Surface::TraceEq {
            left,
            right,
            negated,
        } => write!(f, "{left} {} {right}", if *negated { "!=" } else { "==" }),
    }
}
