//! A direct, cache-free reading of the semantics, used as ground truth.
//!
//! Every clause is evaluated as written: `U` and `S` look for a witness
//! index and check every step in between, set quantifiers range over all
//! subsets of the store, and a fixpoint is the intersection of every subset
//! that satisfies its constraints. Nothing is shared with the evaluator
//! beyond the formula and store types.

use alloc::vec::Vec;

use thiserror::Error;

use crate::eval::{EvalContext, EvalError};
use crate::idset::{IdSet, TraceId};
use crate::syntax::{FixConstraint, Formula, Node, NodeId, SetVar};
use crate::traces::TraceStore;

/// Largest store on which the oracle enumerates subsets.
pub const SUBSET_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle enumerates subsets of at most {limit} traces, the store has {size}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub struct Oracle<'a> {
    formula: &'a Formula,
    store: &'a TraceStore,
    nonempty_sets: bool,
}

struct Env {
    traces: Vec<Option<TraceId>>,
    sets: Vec<Option<IdSet>>,
}

impl<'a> Oracle<'a> {
    pub fn new(formula: &'a Formula, store: &'a TraceStore) -> Self {
        Oracle {
            formula,
            store,
            nonempty_sets: false,
        }
    }

    /// Lets `exists X`/`forall X` range over nonempty subsets only.
    pub fn nonempty_sets(mut self, on: bool) -> Self {
        self.nonempty_sets = on;
        self
    }

    /// `{}, [sys -> store], 0 |= formula`.
    pub fn check(&self) -> Result<bool, OracleError> {
        self.check_at(self.formula.root(), &EvalContext::root())
    }

    pub fn check_at(&self, node: NodeId, ctx: &EvalContext) -> Result<bool, OracleError> {
        let mut env = self.env(node, ctx)?;
        self.sat(&mut env, ctx.time, node)
    }

    /// Every subset of the store that satisfies the constraints of the
    /// fixpoint `node`, in increasing bitmask order.
    pub fn satisfying_sets(&self, node: NodeId, ctx: &EvalContext) -> Result<Vec<IdSet>, OracleError> {
        let mut env = self.env(node, ctx)?;
        self.solutions(&mut env, ctx.time, node)
    }

    /// The least solution of the fixpoint `node`.
    ///
    /// # Panics
    ///
    /// If the intersection of all solutions is not itself a solution.
    pub fn minimal_fix(&self, node: NodeId, ctx: &EvalContext) -> Result<IdSet, OracleError> {
        let mut env = self.env(node, ctx)?;
        self.least(&mut env, ctx.time, node)
    }

    fn env(&self, node: NodeId, ctx: &EvalContext) -> Result<Env, OracleError> {
        let f = self.formula;
        let length = self.store.eval_length();
        if ctx.time >= length {
            return Err(EvalError::TimeOutOfRange {
                time: ctx.time,
                length,
            }
            .into());
        }
        let mut env = Env {
            traces: alloc::vec![None; f.trace_var_count()],
            sets: alloc::vec![None; f.set_var_count()],
        };
        env.sets[SetVar::SYS.index()] = Some(self.store.all());
        for &(var, id) in &ctx.traces {
            if self.store.get(id).is_none() {
                return Err(EvalError::UnknownTrace(id).into());
            }
            env.traces[var.index()] = Some(id);
        }
        for (var, members, _) in &ctx.sets {
            env.sets[var.index()] = Some(members.clone());
        }
        let info = f.info(node);
        for v in &info.free_traces {
            if env.traces[v.index()].is_none() {
                return Err(EvalError::Unassigned {
                    name: f.trace_name(*v).into(),
                }
                .into());
            }
        }
        for s in &info.free_sets {
            if env.sets[s.index()].is_none() {
                return Err(EvalError::Unassigned {
                    name: f.set_name(*s).into(),
                }
                .into());
            }
        }
        Ok(env)
    }

    fn all_subsets(&self) -> Result<impl Iterator<Item = IdSet>, OracleError> {
        let size = self.store.len();
        if size > SUBSET_LIMIT {
            return Err(OracleError::TooLarge {
                size,
                limit: SUBSET_LIMIT,
            });
        }
        Ok((0u32..1 << size).map(move |mask| {
            (0..size as u32)
                .filter(|b| mask >> b & 1 == 1)
                .map(TraceId)
                .collect()
        }))
    }

    fn sat(&self, env: &mut Env, i: usize, node: NodeId) -> Result<bool, OracleError> {
        let m = self.store.eval_length();
        Ok(match self.formula.node(node) {
            Node::True => true,
            Node::False => false,
            Node::Atom { ap, var } => {
                let t = env.traces[var.index()].expect("trace variable is bound");
                self.store.trace(t).at(i).contains(*ap)
            }
            Node::Not(x) => !self.sat(env, i, *x)?,
            Node::And(x, y) => {
                let a = self.sat(env, i, *x)?;
                let b = self.sat(env, i, *y)?;
                a && b
            }
            Node::Next(x) => i + 1 < m && self.sat(env, i + 1, *x)?,
            Node::Prev(x) => i > 0 && self.sat(env, i - 1, *x)?,
            Node::Until(x, y) => {
                let mut found = false;
                for j in i..m {
                    if self.sat(env, j, *y)? && self.all_hold(env, i..j, *x)? {
                        found = true;
                    }
                }
                found
            }
            Node::Since(x, y) => {
                let mut found = false;
                for j in 0..=i {
                    if self.sat(env, j, *y)? && self.all_hold(env, j + 1..i + 1, *x)? {
                        found = true;
                    }
                }
                found
            }
            Node::ExistsTrace { var, set, body } | Node::ForallTrace { var, set, body } => {
                let exists = matches!(self.formula.node(node), Node::ExistsTrace { .. });
                let domain = env.sets[set.index()].clone().expect("set variable is bound");
                let previous = env.traces[var.index()];
                let mut results = Vec::new();
                for t in domain.iter() {
                    env.traces[var.index()] = Some(t);
                    results.push(self.sat(env, i, *body));
                }
                env.traces[var.index()] = previous;
                let results = results.into_iter().collect::<Result<Vec<bool>, _>>()?;
                if exists {
                    results.iter().any(|v| *v)
                } else {
                    results.iter().all(|v| *v)
                }
            }
            Node::ExistsSet { set, body } | Node::ForallSet { set, body } => {
                let exists = matches!(self.formula.node(node), Node::ExistsSet { .. });
                let previous = env.sets[set.index()].take();
                let mut results = Vec::new();
                for a in self.all_subsets()? {
                    if self.nonempty_sets && a.is_empty() {
                        continue;
                    }
                    env.sets[set.index()] = Some(a);
                    results.push(self.sat(env, i, *body));
                }
                env.sets[set.index()] = previous;
                let results = results.into_iter().collect::<Result<Vec<bool>, _>>()?;
                if exists {
                    results.iter().any(|v| *v)
                } else {
                    results.iter().all(|v| *v)
                }
            }
            Node::Fix { set, body, .. } => {
                let solution = self.least(env, i, node)?;
                let previous = env.sets[set.index()].replace(solution);
                let value = self.sat(env, i, *body);
                env.sets[set.index()] = previous;
                value?
            }
        })
    }

    fn all_hold(&self, env: &mut Env, range: core::ops::Range<usize>, x: NodeId) -> Result<bool, OracleError> {
        for k in range {
            if !self.sat(env, k, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn least(&self, env: &mut Env, i: usize, node: NodeId) -> Result<IdSet, OracleError> {
        let solutions = self.solutions(env, i, node)?;
        let mut least = self.store.all();
        for s in &solutions {
            least = least.intersection(s);
        }
        assert!(
            solutions.contains(&least),
            "the intersection of all solutions is not a solution"
        );
        Ok(least)
    }

    fn solutions(&self, env: &mut Env, i: usize, node: NodeId) -> Result<Vec<IdSet>, OracleError> {
        let Node::Fix { set, constraints, .. } = self.formula.node(node) else {
            panic!("not a fixpoint node");
        };
        let previous = env.sets[set.index()].take();
        let mut found = Vec::new();
        let mut outcome = Ok(());
        for candidate in self.all_subsets()? {
            env.sets[set.index()] = Some(candidate.clone());
            match constraints.iter().try_fold(true, |ok, c| {
                Ok::<bool, OracleError>(ok && self.constraint_holds(env, i, c)?)
            }) {
                Ok(true) => found.push(candidate),
                Ok(false) => {}
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            }
        }
        env.sets[set.index()] = previous;
        outcome.map(|()| found)
    }

    /// `forall p1 in X1. ... forall pn in Xn. step => target in set`.
    fn constraint_holds(&self, env: &mut Env, i: usize, c: &FixConstraint) -> Result<bool, OracleError> {
        self.binders_hold(env, i, c, 0)
    }

    fn binders_hold(&self, env: &mut Env, i: usize, c: &FixConstraint, k: usize) -> Result<bool, OracleError> {
        let Some(&(var, set)) = c.binders.get(k) else {
            let target = env.traces[c.target_trace.index()].expect("target is bound");
            let holds = self.sat(env, i, c.step)?;
            let members = env.sets[c.target_set.index()].as_ref().expect("set variable is bound");
            return Ok(!holds || members.contains(target));
        };
        let domain = env.sets[set.index()].clone().expect("set variable is bound");
        let previous = env.traces[var.index()];
        let mut result = Ok(true);
        for t in domain.iter() {
            env.traces[var.index()] = Some(t);
            match self.binders_hold(env, i, c, k + 1) {
                Ok(true) => {}
                other => {
                    result = other;
                    break;
                }
            }
        }
        env.traces[var.index()] = previous;
        result
    }
}

/// `store |= formula`, evaluated naively.
pub fn naive_check(formula: &Formula, store: &TraceStore) -> Result<bool, OracleError> {
    Oracle::new(formula, store).check()
}

/// The least solution of a fixpoint node, found by scanning every subset.
pub fn minimal_fix_by_subsets(
    formula: &Formula,
    store: &TraceStore,
    node: NodeId,
    ctx: &EvalContext,
) -> Result<IdSet, OracleError> {
    Oracle::new(formula, store).minimal_fix(node, ctx)
}
