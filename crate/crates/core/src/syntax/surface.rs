//! The surface AST produced by the parser, before desugaring.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Next,
    Prev,
    Eventually,
    Globally,
    Once,
    Historically,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Next => "X",
            UnaryOp::Prev => "P",
            UnaryOp::Eventually => "F",
            UnaryOp::Globally => "G",
            UnaryOp::Once => "O",
            UnaryOp::Historically => "H",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    And,
    Or,
    Implies,
    Iff,
    Until,
    Since,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Implies => "->",
            BinaryOp::Iff => "<->",
            BinaryOp::Until => "U",
            BinaryOp::Since => "S",
        }
    }
}

/// A formula as written, with named variables and derived operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Surface {
    True,
    False,
    Atom {
        ap: String,
        var: String,
    },
    Unary(UnaryOp, Box<Surface>),
    Binary(BinaryOp, Box<Surface>, Box<Surface>),
    TraceQuant {
        q: Quantifier,
        var: String,
        set: String,
        body: Box<Surface>,
    },
    SetQuant {
        q: Quantifier,
        set: String,
        body: Box<Surface>,
    },
    Fix {
        set: String,
        constraints: Vec<SurfaceConstraint>,
        body: Box<Surface>,
    },
    TraceEq {
        left: String,
        right: String,
        negated: bool,
    },
}

/// `forall p1 in X1. ... forall pn in Xn. step => target in set`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceConstraint {
    pub binders: Vec<(String, String)>,
    pub step: Surface,
    pub target_trace: String,
    pub target_set: String,
}

impl Surface {
    pub fn atom(ap: &str, var: &str) -> Surface {
        Surface::Atom {
            ap: ap.into(),
            var: var.into(),
        }
    }

    pub fn unary(op: UnaryOp, x: Surface) -> Surface {
        Surface::Unary(op, Box::new(x))
    }

    pub fn binary(op: BinaryOp, x: Surface, y: Surface) -> Surface {
        Surface::Binary(op, Box::new(x), Box::new(y))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(x: Surface) -> Surface {
        Surface::unary(UnaryOp::Not, x)
    }

    pub fn and(x: Surface, y: Surface) -> Surface {
        Surface::binary(BinaryOp::And, x, y)
    }

    pub fn or(x: Surface, y: Surface) -> Surface {
        Surface::binary(BinaryOp::Or, x, y)
    }

    pub fn iff(x: Surface, y: Surface) -> Surface {
        Surface::binary(BinaryOp::Iff, x, y)
    }

    pub fn trace_quant(q: Quantifier, var: &str, set: &str, body: Surface) -> Surface {
        Surface::TraceQuant {
            q,
            var: var.into(),
            set: set.into(),
            body: Box::new(body),
        }
    }

    pub fn set_quant(q: Quantifier, set: &str, body: Surface) -> Surface {
        Surface::SetQuant {
            q,
            set: set.into(),
            body: Box::new(body),
        }
    }

    /// Number of AST nodes; every connective counts once.
    pub fn size(&self) -> usize {
        match self {
            Surface::True | Surface::False | Surface::Atom { .. } | Surface::TraceEq { .. } => 1,
            Surface::Unary(_, x) => 1 + x.size(),
            Surface::Binary(_, x, y) => 1 + x.size() + y.size(),
            Surface::TraceQuant { body, .. } | Surface::SetQuant { body, .. } => 1 + body.size(),
            Surface::Fix {
                constraints, body, ..
            } => 1 + body.size() + constraints.iter().map(|c| c.step.size()).sum::<usize>(),
        }
    }

    /// Names of all atomic propositions used.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |s| {
            if let Surface::Atom { ap, .. } = s {
                out.insert(ap.clone());
            }
        });
        out
    }

    pub fn uses_trace_equality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |s| found |= matches!(s, Surface::TraceEq { .. }));
        found
    }

    /// Pre-order traversal, including constraint steps.
    pub fn visit(&self, f: &mut impl FnMut(&Surface)) {
        f(self);
        match self {
            Surface::Unary(_, x) => x.visit(f),
            Surface::Binary(_, x, y) => {
                x.visit(f);
                y.visit(f);
            }
            Surface::TraceQuant { body, .. } | Surface::SetQuant { body, .. } => body.visit(f),
            Surface::Fix {
                constraints, body, ..
            } => {
                for c in constraints {
                    c.step.visit(f);
                }
                body.visit(f);
            }
            _ => {}
        }
    }

    /// Every variable name (trace or set) mentioned anywhere.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |s| match s {
            Surface::Atom { var, .. } => {
                out.insert(var.clone());
            }
            Surface::TraceQuant { var, set, .. } => {
                out.insert(var.clone());
                out.insert(set.clone());
            }
            Surface::SetQuant { set, .. } => {
                out.insert(set.clone());
            }
            Surface::Fix {
                set, constraints, ..
            } => {
                out.insert(set.clone());
                for c in constraints {
                    for (v, s) in &c.binders {
                        out.insert(v.clone());
                        out.insert(s.clone());
                    }
                    out.insert(c.target_trace.clone());
                    out.insert(c.target_set.clone());
                }
            }
            Surface::TraceEq { left, right, .. } => {
                out.insert(left.clone());
                out.insert(right.clone());
            }
            _ => {}
        });
        out
    }
}
