//! The incremental model checker.
//!
//! [`Evaluator::check`] decides `sys ↦ 𝕋, time 0 ⊨ φ` by structural
//! recursion. Set quantifiers enumerate every subset of the store;
//! fixpoints are computed by iterating their constraints from a seed
//! until nothing is added.
//!
//! Results are reused across calls through three caches, each of which can
//! be switched off in [`Options`]:
//!
//! * `sat`: subformula results. A result is reused across store versions
//!   when the node's marks justify it (true with `+`, false with `-`) and
//!   otherwise only within the same store version.
//! * `fix`: fixpoint solutions. A solution from an earlier version seeds
//!   the computation; one from the current version is used as is.
//! * `wit`: the last witness (for `exists`) or counterexample (for
//!   `forall`) of a trace quantifier is tried first.
//!
//! With `tree` on, traces sharing their suffix from the current step are
//! evaluated once for past-free bodies and steps.
//!
//! Cache keys restrict the assignment to the node's free variables. Sets
//! that only grow (`sys` and fixpoint variables) are keyed by where they
//! come from rather than by content, so entries keep matching as the store
//! grows; sets bound by `exists X`/`forall X` are keyed by content. One
//! evaluator must always be used with the same, growing store.

mod subsets;

use alloc::boxed::Box;
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Sub;

use hashbrown::{HashMap, HashSet};
use thiserror::Error;

pub use subsets::{subsets, Subsets};

use crate::idset::{IdSet, TraceId};
use crate::monotonicity::{compute_mon_map, MonMap};
use crate::syntax::{Formula, Node, NodeId, SetVar, TraceVar};
use crate::traces::TraceStore;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub sat_hash: bool,
    pub fix_hash: bool,
    pub wit_hash: bool,
    pub tree_lift: bool,
    /// Largest store on which set quantifiers may enumerate subsets.
    pub subset_bound: usize,
}

pub const DEFAULT_SUBSET_BOUND: usize = 20;

impl Default for Options {
    fn default() -> Self {
        Options::all()
    }
}

impl Options {
    pub fn all() -> Self {
        Options::from_mask(0b1111)
    }

    pub fn none() -> Self {
        Options::from_mask(0)
    }

    /// Bit 0: sat, bit 1: fix, bit 2: wit, bit 3: tree.
    pub fn from_mask(mask: u8) -> Self {
        Options {
            sat_hash: mask & 1 != 0,
            fix_hash: mask & 2 != 0,
            wit_hash: mask & 4 != 0,
            tree_lift: mask & 8 != 0,
            subset_bound: DEFAULT_SUBSET_BOUND,
        }
    }

    pub fn mask(&self) -> u8 {
        self.sat_hash as u8
            | (self.fix_hash as u8) << 1
            | (self.wit_hash as u8) << 2
            | (self.tree_lift as u8) << 3
    }

    /// All sixteen on/off combinations of the optimizations.
    pub fn combinations() -> impl Iterator<Item = Options> {
        (0..16).map(Options::from_mask)
    }
}

impl fmt::Display for Options {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.sat_hash, "sat"),
            (self.fix_hash, "fix"),
            (self.wit_hash, "wit"),
            (self.tree_lift, "tree"),
        ];
        let on: Vec<&str> = names.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect();
        if on.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&on.join("+"))
        }
    }
}

/// Deterministic work counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Calls of the recursive check, cache hits included.
    pub check_calls: u64,
    /// Step formulas evaluated during fixpoint computations.
    pub step_checks: u64,
    /// Check calls answered from the subformula cache.
    pub sat_hits: u64,
    /// Fixpoint computations seeded with an earlier solution.
    pub fix_seeds: u64,
    /// Quantifiers decided by the cached witness or counterexample.
    pub wit_hits: u64,
}

impl Sub for Counters {
    type Output = Counters;
    fn sub(self, rhs: Counters) -> Counters {
        Counters {
            check_calls: self.check_calls - rhs.check_calls,
            step_checks: self.step_checks - rhs.step_checks,
            sat_hits: self.sat_hits - rhs.sat_hits,
            fix_seeds: self.fix_seeds - rhs.fix_seeds,
            wit_hits: self.wit_hits - rhs.wit_hits,
        }
    }
}

impl fmt::Display for Counters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check_calls={} step_checks={} sat_hits={} fix_seeds={} wit_hits={}",
            self.check_calls, self.step_checks, self.sat_hits, self.fix_seeds, self.wit_hits
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("set quantifier over {size} traces exceeds the subset bound {bound} (raise it with --subset-bound)")]
    SubsetBound { size: usize, bound: usize },
    #[error("variable `{name}` is not assigned")]
    Unassigned { name: alloc::string::String },
    #[error("time {time} is out of range for trace length {length}")]
    TimeOutOfRange { time: usize, length: usize },
    #[error("trace id {0} is not in the store")]
    UnknownTrace(TraceId),
}

/// How a set variable's value may change as the store grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    /// Only grows (`sys`, fixpoint variables).
    Monotone,
    /// A fixed set chosen by a set quantifier.
    Extensional,
}

/// An assignment for evaluating a single node.
#[derive(Clone, Debug, Default)]
pub struct EvalContext {
    pub traces: Vec<(TraceVar, TraceId)>,
    /// Sets other than `sys`, which is always the whole store.
    pub sets: Vec<(SetVar, IdSet, SetKind)>,
    pub time: usize,
}

impl EvalContext {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn at(time: usize) -> Self {
        EvalContext {
            time,
            ..Self::default()
        }
    }

    pub fn with_trace(mut self, var: TraceVar, id: TraceId) -> Self {
        self.traces.push((var, id));
        self
    }

    pub fn with_set(mut self, var: SetVar, members: IdSet, kind: SetKind) -> Self {
        self.sets.push((var, members, kind));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum SetKey {
    Monotone(u32),
    Extensional(Rc<IdSet>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    node: NodeId,
    time: u32,
    traces: Box<[TraceId]>,
    sets: Box<[SetKey]>,
}

#[derive(Clone, Debug)]
struct Binding {
    members: Rc<IdSet>,
    key: SetKey,
}

#[derive(Clone, Copy, Debug)]
struct SatEntry {
    value: bool,
    version: u64,
}

#[derive(Clone, Debug)]
struct FixEntry {
    solution: Rc<IdSet>,
    version: u64,
}

struct Env {
    traces: Vec<Option<TraceId>>,
    sets: Vec<Option<Binding>>,
}

/// Provenance id of `sys`.
const SYS_ORIGIN: u32 = 0;

pub struct Evaluator {
    formula: Formula,
    mon: MonMap,
    options: Options,
    counters: Counters,
    h_sat: HashMap<CacheKey, SatEntry>,
    h_fix: HashMap<CacheKey, FixEntry>,
    h_wit: HashMap<CacheKey, TraceId>,
    origins: HashMap<CacheKey, u32>,
    pruned_at: u64,
}

impl Evaluator {
    pub fn new(formula: Formula, options: Options) -> Self {
        let mon = compute_mon_map(&formula);
        Evaluator {
            formula,
            mon,
            options,
            counters: Counters::default(),
            h_sat: HashMap::new(),
            h_fix: HashMap::new(),
            h_wit: HashMap::new(),
            origins: HashMap::new(),
            pruned_at: 0,
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn mon_map(&self) -> &MonMap {
        &self.mon
    }

    pub fn options(&self) -> Options {
        self.options
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Evaluates the whole formula at time 0 with `sys` bound to the store.
    pub fn check(&mut self, store: &TraceStore) -> Result<bool, EvalError> {
        let root = self.formula.root();
        self.check_at(store, root, &EvalContext::root())
    }

    /// Evaluates one node under an explicit assignment.
    pub fn check_at(
        &mut self,
        store: &TraceStore,
        node: NodeId,
        ctx: &EvalContext,
    ) -> Result<bool, EvalError> {
        let mut env = self.env(store, node, ctx)?;
        self.prune(store);
        Run { ev: self, store }.check(&mut env, node, ctx.time)
    }

    /// The least solution of the fixpoint `node` under `ctx`, starting from
    /// `seed`, which must be below the solution. The `fix` cache is neither
    /// read nor written.
    pub fn compute_fix(
        &mut self,
        store: &TraceStore,
        node: NodeId,
        ctx: &EvalContext,
        seed: &IdSet,
    ) -> Result<IdSet, EvalError> {
        assert!(
            matches!(self.formula.node(node), Node::Fix { .. }),
            "compute_fix needs a fixpoint node"
        );
        let mut env = self.env(store, node, ctx)?;
        self.prune(store);
        Run { ev: self, store }.compute_fix(&mut env, node, ctx.time, seed.clone())
    }

    fn env(&self, store: &TraceStore, node: NodeId, ctx: &EvalContext) -> Result<Env, EvalError> {
        let length = store.eval_length();
        if ctx.time >= length {
            return Err(EvalError::TimeOutOfRange {
                time: ctx.time,
                length,
            });
        }
        let f = &self.formula;
        let mut env = Env {
            traces: alloc::vec![None; f.trace_var_count()],
            sets: alloc::vec![None; f.set_var_count()],
        };
        env.sets[SetVar::SYS.index()] = Some(Binding {
            members: Rc::new(store.all()),
            key: SetKey::Monotone(SYS_ORIGIN),
        });
        for &(var, id) in &ctx.traces {
            if store.get(id).is_none() {
                return Err(EvalError::UnknownTrace(id));
            }
            env.traces[var.index()] = Some(id);
        }
        for (k, (var, members, kind)) in ctx.sets.iter().enumerate() {
            if let Some(id) = members.iter().find(|id| store.get(*id).is_none()) {
                return Err(EvalError::UnknownTrace(id));
            }
            let members = Rc::new(members.clone());
            let key = match kind {
                // Caller-supplied growing sets get provenance ids that no
                // fixpoint can produce.
                SetKind::Monotone => SetKey::Monotone(u32::MAX - k as u32),
                SetKind::Extensional => SetKey::Extensional(members.clone()),
            };
            env.sets[var.index()] = Some(Binding { members, key });
        }
        let info = f.info(node);
        if let Some(v) = info.free_traces.iter().find(|v| env.traces[v.index()].is_none()) {
            return Err(EvalError::Unassigned {
                name: f.trace_name(*v).into(),
            });
        }
        if let Some(s) = info.free_sets.iter().find(|s| env.sets[s.index()].is_none()) {
            return Err(EvalError::Unassigned {
                name: f.set_name(*s).into(),
            });
        }
        Ok(env)
    }

    /// Drops subformula results that are neither from the current version
    /// nor justified by a mark.
    fn prune(&mut self, store: &TraceStore) {
        let version = store.version();
        if version == self.pruned_at {
            return;
        }
        self.pruned_at = version;
        let mon = &self.mon;
        self.h_sat.retain(|key, entry| {
            let marks = mon.get(key.node);
            (entry.value && marks.plus()) || (!entry.value && marks.minus())
        });
    }
}

/// One evaluation against a fixed store.
struct Run<'a> {
    ev: &'a mut Evaluator,
    store: &'a TraceStore,
}

impl Run<'_> {
    fn key(&self, env: &Env, node: NodeId, time: usize) -> CacheKey {
        let info = self.ev.formula.info(node);
        CacheKey {
            node,
            time: time as u32,
            traces: info
                .free_traces
                .iter()
                .map(|v| env.traces[v.index()].expect("free trace variable is assigned"))
                .collect(),
            sets: info
                .free_sets
                .iter()
                .map(|s| {
                    env.sets[s.index()]
                        .as_ref()
                        .expect("free set variable is assigned")
                        .key
                        .clone()
                })
                .collect(),
        }
    }

    fn trace(&self, env: &Env, var: TraceVar) -> TraceId {
        env.traces[var.index()].expect("free trace variable is assigned")
    }

    fn members(&self, env: &Env, set: SetVar) -> Rc<IdSet> {
        env.sets[set.index()]
            .as_ref()
            .expect("free set variable is assigned")
            .members
            .clone()
    }

    fn check(&mut self, env: &mut Env, node: NodeId, time: usize) -> Result<bool, EvalError> {
        self.ev.counters.check_calls += 1;
        let cached = self.ev.options.sat_hash
            && !matches!(
                self.ev.formula.node(node),
                Node::True | Node::False | Node::Atom { .. }
            );
        if !cached {
            return self.eval(env, node, time);
        }
        let key = self.key(env, node, time);
        let version = self.store.version();
        if let Some(entry) = self.ev.h_sat.get(&key) {
            let marks = self.ev.mon.get(node);
            if (entry.value && marks.plus())
                || (!entry.value && marks.minus())
                || entry.version == version
            {
                self.ev.counters.sat_hits += 1;
                return Ok(entry.value);
            }
        }
        let value = self.eval(env, node, time)?;
        self.ev.h_sat.insert(key, SatEntry { value, version });
        Ok(value)
    }

    fn eval(&mut self, env: &mut Env, node: NodeId, time: usize) -> Result<bool, EvalError> {
        let m = self.store.eval_length();
        // Nodes are small; cloning avoids holding a borrow of the formula.
        match self.ev.formula.node(node).clone() {
            Node::True => Ok(true),
            Node::False => Ok(false),
            Node::Atom { ap, var } => {
                let id = self.trace(env, var);
                Ok(self.store.trace(id).at(time).contains(ap))
            }
            Node::Not(x) => Ok(!self.check(env, x, time)?),
            Node::And(x, y) => Ok(self.check(env, x, time)? && self.check(env, y, time)?),
            Node::Next(x) => Ok(time + 1 < m && self.check(env, x, time + 1)?),
            Node::Prev(x) => Ok(time > 0 && self.check(env, x, time - 1)?),
            Node::Until(x, y) => {
                for j in time..m {
                    if self.check(env, y, j)? {
                        return Ok(true);
                    }
                    if !self.check(env, x, j)? {
                        return Ok(false);
                    }
                }
                Ok(false)
            }
            Node::Since(x, y) => {
                for j in (0..=time).rev() {
                    if self.check(env, y, j)? {
                        return Ok(true);
                    }
                    if !self.check(env, x, j)? {
                        return Ok(false);
                    }
                }
                Ok(false)
            }
            Node::ExistsTrace { var, set, body } => self.trace_quant(env, node, time, var, set, body, true),
            Node::ForallTrace { var, set, body } => self.trace_quant(env, node, time, var, set, body, false),
            Node::ExistsSet { set, body } => self.set_quant(env, time, set, body, true),
            Node::ForallSet { set, body } => self.set_quant(env, time, set, body, false),
            Node::Fix { set, body, .. } => {
                let key = self.key(env, node, time);
                let origin = self.origin(&key);
                let solution = self.solve(env, node, time, key)?;
                let previous = env.sets[set.index()].replace(Binding {
                    members: solution,
                    key: SetKey::Monotone(origin),
                });
                let result = self.check(env, body, time);
                env.sets[set.index()] = previous;
                result
            }
        }
    }

    /// `exists` looks for a body that holds, `forall` for one that fails.
    #[allow(clippy::too_many_arguments)]
    fn trace_quant(
        &mut self,
        env: &mut Env,
        node: NodeId,
        time: usize,
        var: TraceVar,
        set: SetVar,
        body: NodeId,
        exists: bool,
    ) -> Result<bool, EvalError> {
        let domain = self.members(env, set);
        let wit_key = self.ev.options.wit_hash.then(|| self.key(env, node, time));
        let hint = wit_key
            .as_ref()
            .and_then(|k| self.ev.h_wit.get(k).copied())
            .filter(|t| domain.contains(*t));
        let lift = self.ev.options.tree_lift && self.ev.formula.info(body).past_free;
        let mut seen_classes: HashSet<u32> = HashSet::new();
        let order = hint.into_iter().chain(domain.iter().filter(|t| Some(*t) != hint));
        let previous = env.traces[var.index()];
        let mut decided = None;
        for (k, t) in order.enumerate() {
            if lift && !seen_classes.insert(self.store.suffix_class(t, time)) {
                continue;
            }
            env.traces[var.index()] = Some(t);
            let value = self.check(env, body, time);
            let value = match value {
                Ok(v) => v,
                Err(e) => {
                    env.traces[var.index()] = previous;
                    return Err(e);
                }
            };
            if value == exists {
                if k == 0 && hint.is_some() {
                    self.ev.counters.wit_hits += 1;
                }
                decided = Some(t);
                break;
            }
        }
        env.traces[var.index()] = previous;
        match decided {
            Some(t) => {
                if let Some(key) = wit_key {
                    self.ev.h_wit.insert(key, t);
                }
                Ok(exists)
            }
            None => Ok(!exists),
        }
    }

    fn set_quant(
        &mut self,
        env: &mut Env,
        time: usize,
        set: SetVar,
        body: NodeId,
        exists: bool,
    ) -> Result<bool, EvalError> {
        let size = self.store.len();
        let bound = self.ev.options.subset_bound;
        if size > bound {
            return Err(EvalError::SubsetBound { size, bound });
        }
        let previous = env.sets[set.index()].take();
        let mut result = Ok(!exists);
        for subset in subsets(size) {
            let members = Rc::new(subset);
            env.sets[set.index()] = Some(Binding {
                key: SetKey::Extensional(members.clone()),
                members,
            });
            match self.check(env, body, time) {
                Ok(v) if v == exists => {
                    result = Ok(exists);
                    break;
                }
                Ok(_) => {}
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        env.sets[set.index()] = previous;
        result
    }

    /// Interns the provenance of a fixpoint variable.
    fn origin(&mut self, key: &CacheKey) -> u32 {
        let next = self.ev.origins.len() as u32 + 1;
        *self.ev.origins.entry(key.clone()).or_insert(next)
    }

    fn solve(
        &mut self,
        env: &mut Env,
        node: NodeId,
        time: usize,
        key: CacheKey,
    ) -> Result<Rc<IdSet>, EvalError> {
        let version = self.store.version();
        let mut seed = IdSet::new();
        if self.ev.options.fix_hash {
            if let Some(entry) = self.ev.h_fix.get(&key) {
                if entry.version == version {
                    return Ok(entry.solution.clone());
                }
                self.ev.counters.fix_seeds += 1;
                seed = (*entry.solution).clone();
            }
        }
        let solution = Rc::new(self.compute_fix(env, node, time, seed)?);
        if self.ev.options.fix_hash {
            self.ev.h_fix.insert(
                key,
                FixEntry {
                    solution: solution.clone(),
                    version,
                },
            );
        }
        Ok(solution)
    }

    /// Adds one target at a time and rescans all constraints after each
    /// addition, until a full scan adds nothing.
    fn compute_fix(
        &mut self,
        env: &mut Env,
        node: NodeId,
        time: usize,
        mut acc: IdSet,
    ) -> Result<IdSet, EvalError> {
        let Node::Fix {
            set, constraints, ..
        } = self.ev.formula.node(node).clone()
        else {
            unreachable!("compute_fix on a non-fixpoint node")
        };
        let lift = self.ev.options.tree_lift;
        let mut memo: HashMap<(usize, Vec<u32>), bool> = HashMap::new();
        'rescan: loop {
            for (ci, c) in constraints.iter().enumerate() {
                let domains: Vec<Vec<TraceId>> = c
                    .binders
                    .iter()
                    .map(|(_, s)| {
                        if *s == set {
                            acc.iter().collect()
                        } else {
                            self.members(env, *s).iter().collect()
                        }
                    })
                    .collect();
                if domains.iter().any(|d| d.is_empty()) {
                    continue;
                }
                let lift_step = lift && self.ev.formula.info(c.step).past_free;
                let mut idx = alloc::vec![0usize; domains.len()];
                loop {
                    for (b, (v, _)) in c.binders.iter().enumerate() {
                        env.traces[v.index()] = Some(domains[b][idx[b]]);
                    }
                    let target = self.trace(env, c.target_trace);
                    if !acc.contains(target) {
                        let holds = if lift_step {
                            let classes: Vec<u32> = (0..domains.len())
                                .map(|b| self.store.suffix_class(domains[b][idx[b]], time))
                                .collect();
                            match memo.get(&(ci, classes.clone())) {
                                Some(v) => *v,
                                None => {
                                    let v = self.step(env, c.step, time);
                                    let v = self.unbind(env, &c.binders, v)?;
                                    memo.insert((ci, classes), v);
                                    v
                                }
                            }
                        } else {
                            let v = self.step(env, c.step, time);
                            self.unbind(env, &c.binders, v)?
                        };
                        if holds {
                            acc.insert(target);
                            for (v, _) in &c.binders {
                                env.traces[v.index()] = None;
                            }
                            continue 'rescan;
                        }
                    }
                    if !advance(&mut idx, &domains) {
                        break;
                    }
                }
                for (v, _) in &c.binders {
                    env.traces[v.index()] = None;
                }
            }
            return Ok(acc);
        }
    }

    fn step(&mut self, env: &mut Env, step: NodeId, time: usize) -> Result<bool, EvalError> {
        self.ev.counters.step_checks += 1;
        self.check(env, step, time)
    }

    /// Clears the binders if evaluation failed.
    fn unbind(
        &self,
        env: &mut Env,
        binders: &[(TraceVar, SetVar)],
        value: Result<bool, EvalError>,
    ) -> Result<bool, EvalError> {
        if value.is_err() {
            for (v, _) in binders {
                env.traces[v.index()] = None;
            }
        }
        value
    }
}

/// Odometer step over the binder domains, last binder fastest.
fn advance(idx: &mut [usize], domains: &[Vec<TraceId>]) -> bool {
    for b in (0..idx.len()).rev() {
        idx[b] += 1;
        if idx[b] < domains[b].len() {
            return true;
        }
        idx[b] = 0;
    }
    false
}

#[cfg(test)]
mod tests;
