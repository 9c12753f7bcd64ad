//! Random closed, well-formed formulas and random trace sets for
//! differential testing.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ap::{ApSet, ApUniverse};
use crate::syntax::surface::{BinaryOp, Quantifier, SurfaceConstraint, UnaryOp};
use crate::syntax::{compile_surface, Formula, Surface, SYS};

const AP_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaParams {
    /// Number of propositions, named `a`, `b`, ...
    pub aps: usize,
    /// Upper bound on the size of the desugared formula.
    pub max_nodes: usize,
    pub max_depth: u32,
    pub fix: bool,
    pub set_quantifiers: bool,
}

impl Default for FormulaParams {
    fn default() -> Self {
        FormulaParams {
            aps: 3,
            max_nodes: 25,
            max_depth: 5,
            fix: true,
            set_quantifiers: true,
        }
    }
}

pub fn universe(aps: usize) -> ApUniverse {
    ApUniverse::from_names(&AP_NAMES[..aps]).expect("valid names")
}

#[derive(Clone, Default)]
struct Scope {
    traces: Vec<String>,
    sets: Vec<String>,
    next: usize,
    set_quants: u32,
    fixes: u32,
}

struct Gen<'a, R> {
    rng: &'a mut R,
    params: FormulaParams,
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&self, scope: &mut Scope, prefix: &str) -> String {
        scope.next += 1;
        format!("{prefix}{}", scope.next)
    }

    fn ap(&mut self) -> String {
        String::from(AP_NAMES[self.rng.gen_range(0..self.params.aps)])
    }

    fn formula(&mut self, scope: &mut Scope, depth: u32) -> Surface {
        let has_traces = !scope.traces.is_empty();
        if depth == 0 {
            return if has_traces {
                let var = scope.traces.choose(self.rng).unwrap().clone();
                Surface::atom(&self.ap(), &var)
            } else if self.rng.gen_bool(0.5) {
                Surface::True
            } else {
                Surface::False
            };
        }
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=14 if has_traces => {
                let var = scope.traces.choose(self.rng).unwrap().clone();
                Surface::atom(&self.ap(), &var)
            }
            15..=29 => {
                let op = *[
                    UnaryOp::Not,
                    UnaryOp::Not,
                    UnaryOp::Next,
                    UnaryOp::Prev,
                    UnaryOp::Eventually,
                    UnaryOp::Globally,
                    UnaryOp::Once,
                    UnaryOp::Historically,
                ]
                .choose(self.rng)
                .unwrap();
                Surface::unary(op, self.formula(scope, depth - 1))
            }
            30..=49 => {
                let op = *[
                    BinaryOp::And,
                    BinaryOp::And,
                    BinaryOp::Or,
                    BinaryOp::Implies,
                    BinaryOp::Until,
                    BinaryOp::Since,
                ]
                .choose(self.rng)
                .unwrap();
                let x = self.formula(scope, depth - 1);
                let y = self.formula(scope, depth - 1);
                Surface::binary(op, x, y)
            }
            50..=64 if self.params.set_quantifiers && scope.set_quants < 2 => {
                let name = self.fresh(scope, "X");
                let q = self.quantifier();
                let mut inner = scope.clone();
                inner.sets.push(name.clone());
                inner.set_quants += 1;
                let body = self.formula(&mut inner, depth - 1);
                scope.next = inner.next;
                Surface::set_quant(q, &name, body)
            }
            65..=76 if self.params.fix && scope.fixes < 1 => self.fix(scope, depth),
            _ => {
                let var = self.fresh(scope, "p");
                let set = scope.sets.choose(self.rng).unwrap().clone();
                let q = self.quantifier();
                let mut inner = scope.clone();
                inner.traces.push(var.clone());
                let body = self.formula(&mut inner, depth - 1);
                scope.next = inner.next;
                Surface::trace_quant(q, &var, &set, body)
            }
        }
    }

    fn quantifier(&mut self) -> Quantifier {
        if self.rng.gen_bool(0.5) {
            Quantifier::Exists
        } else {
            Quantifier::Forall
        }
    }

    fn fix(&mut self, scope: &mut Scope, depth: u32) -> Surface {
        let set = self.fresh(scope, "K");
        let count = self.rng.gen_range(1..=2);
        let mut constraints = Vec::new();
        for k in 0..count {
            // The first constraint is usually a seed over `sys` or an outer trace.
            let binders = match (k, self.rng.gen_range(0..3)) {
                (0, 0) | (0, 1) if !scope.traces.is_empty() => 0,
                (0, _) => 1,
                (_, 0) if scope.traces.is_empty() => 1,
                (_, n) => n.min(2),
            };
            let mut vars = Vec::new();
            for b in 0..binders {
                let var = self.fresh(scope, "q");
                let domain = if k == 0 || (b > 0 && self.rng.gen_bool(0.5)) {
                    let mut choices = scope.sets.clone();
                    if k > 0 {
                        choices.push(set.clone());
                    }
                    choices.choose(self.rng).unwrap().clone()
                } else {
                    set.clone()
                };
                vars.push((var, domain));
            }
            let mut visible: Vec<String> = scope.traces.clone();
            visible.extend(vars.iter().map(|(v, _)| v.clone()));
            let target = visible.choose(self.rng).unwrap().clone();
            let mut step_scope = Scope {
                traces: visible,
                ..Scope::default()
            };
            let step_depth = self.rng.gen_range(0..=2);
            let step = self.step(&mut step_scope, step_depth);
            constraints.push(SurfaceConstraint {
                binders: vars,
                step,
                target_trace: target,
                target_set: set.clone(),
            });
        }
        let mut inner = scope.clone();
        inner.sets.push(set.clone());
        inner.fixes += 1;
        let body = self.formula(&mut inner, depth - 1);
        scope.next = inner.next;
        Surface::Fix {
            set,
            constraints,
            body: Box::new(body),
        }
    }

    /// Quantifier-free formulas over the visible trace variables.
    fn step(&mut self, scope: &mut Scope, depth: u32) -> Surface {
        if depth == 0 {
            if self.rng.gen_bool(0.2) {
                return Surface::True;
            }
            let var = scope.traces.choose(self.rng).unwrap().clone();
            return Surface::atom(&self.ap(), &var);
        }
        match self.rng.gen_range(0..4) {
            0 => {
                let op = *[UnaryOp::Not, UnaryOp::Historically, UnaryOp::Once, UnaryOp::Eventually]
                    .choose(self.rng)
                    .unwrap();
                Surface::unary(op, self.step(scope, depth - 1))
            }
            1 => Surface::iff(self.step(scope, depth - 1), self.step(scope, depth - 1)),
            _ => {
                let op = *[BinaryOp::And, BinaryOp::Or].choose(self.rng).unwrap();
                let x = self.step(scope, depth - 1);
                let y = self.step(scope, depth - 1);
                Surface::binary(op, x, y)
            }
        }
    }
}

/// A closed formula; may exceed `max_nodes` once desugared.
pub fn surface<R: Rng>(rng: &mut R, params: FormulaParams) -> Surface {
    let mut scope = Scope {
        sets: alloc::vec![String::from(SYS)],
        ..Scope::default()
    };
    let depth = rng.gen_range(1..=params.max_depth);
    Gen { rng, params }.formula(&mut scope, depth)
}

/// A closed, well-formed formula of at most `params.max_nodes` core nodes
/// over [`universe`]`(params.aps)`.
pub fn formula<R: Rng>(rng: &mut R, params: FormulaParams) -> (Surface, Formula) {
    let mut u = universe(params.aps);
    loop {
        let s = surface(rng, params);
        let f = compile_surface(&s, &mut u).expect("generated formulas are well-formed");
        if f.len() <= params.max_nodes {
            return (s, f);
        }
    }
}

/// Up to `max_traces` random traces of one random length in `1..=max_len`.
pub fn traces<R: Rng>(rng: &mut R, aps: usize, max_traces: usize, max_len: usize) -> Vec<Vec<ApSet>> {
    let len = rng.gen_range(1..=max_len);
    let count = rng.gen_range(0..=max_traces);
    (0..count).map(|_| word(rng, aps, len)).collect()
}

pub fn word<R: Rng>(rng: &mut R, aps: usize, len: usize) -> Vec<ApSet> {
    (0..len)
        .map(|_| ApSet::from_bits(rng.gen_range(0..1u64 << aps)))
        .collect()
}
