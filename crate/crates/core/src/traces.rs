//! The growing set of observed traces.
//!
//! Traces are deduplicated, normalized to a common length and indexed by
//! a prefix trie and a postfix trie. Every trie node records the ids of
//! the traces passing through it, so the traces that agree on a suffix
//! are read off a single node.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use thiserror::Error;

use crate::ap::{ApError, ApSet, ApUniverse};
use crate::idset::{IdSet, TraceId};

/// How traces of a different length than the first one are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LengthPolicy {
    /// Longer traces are cropped; shorter traces are rejected.
    Crop,
    /// Shorter traces are padded with empty steps; longer ones are cropped.
    #[default]
    Pad,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    steps: Box<[ApSet]>,
}

impl Trace {
    pub fn new(steps: impl Into<Box<[ApSet]>>) -> Self {
        Trace {
            steps: steps.into(),
        }
    }

    pub fn steps(&self) -> &[ApSet] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn at(&self, i: usize) -> ApSet {
        self.steps[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    Added(TraceId),
    Duplicate(TraceId),
}

impl Insertion {
    pub fn id(self) -> TraceId {
        match self {
            Insertion::Added(id) | Insertion::Duplicate(id) => id,
        }
    }

    pub fn is_added(self) -> bool {
        matches!(self, Insertion::Added(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("empty trace")]
    Empty,
    #[error("trace of length {len} is shorter than the store length {expected}")]
    TooShort { len: usize, expected: usize },
    #[error("step {step} mentions a proposition outside the universe")]
    OutsideUniverse { step: usize },
    #[error(transparent)]
    Ap(#[from] ApError),
}

#[derive(Clone, Debug, Default)]
struct TrieNode {
    children: BTreeMap<ApSet, u32>,
    ids: Vec<TraceId>,
}

/// A trie over words; node 0 is the root (the empty word).
#[derive(Clone, Debug)]
struct Trie {
    nodes: Vec<TrieNode>,
    by_depth: Vec<Vec<u32>>,
}

impl Trie {
    fn new() -> Self {
        Trie {
            nodes: alloc::vec![TrieNode::default()],
            by_depth: alloc::vec![alloc::vec![0]],
        }
    }

    /// Inserts `word` for `id` and returns the node reached after each
    /// letter, starting with the root.
    fn insert(&mut self, id: TraceId, word: impl Iterator<Item = ApSet>) -> Vec<u32> {
        let mut path = alloc::vec![0u32];
        let mut node = 0u32;
        self.nodes[0].ids.push(id);
        for (depth, letter) in word.enumerate() {
            let next = match self.nodes[node as usize].children.get(&letter) {
                Some(&child) => child,
                None => {
                    let child = self.nodes.len() as u32;
                    self.nodes.push(TrieNode::default());
                    self.nodes[node as usize].children.insert(letter, child);
                    if self.by_depth.len() <= depth + 1 {
                        self.by_depth.push(Vec::new());
                    }
                    self.by_depth[depth + 1].push(child);
                    child
                }
            };
            self.nodes[next as usize].ids.push(id);
            path.push(next);
            node = next;
        }
        path
    }

    fn classes(&self, depth: usize) -> Vec<Vec<TraceId>> {
        let mut out: Vec<Vec<TraceId>> = self
            .by_depth
            .get(depth)
            .map(|nodes| nodes.iter().map(|&n| self.nodes[n as usize].ids.clone()).collect())
            .unwrap_or_default();
        out.sort();
        out
    }
}

/// A deduplicated set of equal-length traces with dense ids.
#[derive(Clone, Debug)]
pub struct TraceStore {
    universe: ApUniverse,
    policy: LengthPolicy,
    length: Option<usize>,
    traces: Vec<Trace>,
    index: HashMap<Trace, TraceId>,
    version: u64,
    prefix: Trie,
    postfix: Trie,
    postfix_paths: Vec<Vec<u32>>,
}

impl TraceStore {
    pub fn new(universe: ApUniverse, policy: LengthPolicy) -> Self {
        TraceStore {
            universe,
            policy,
            length: None,
            traces: Vec::new(),
            index: HashMap::new(),
            version: 0,
            prefix: Trie::new(),
            postfix: Trie::new(),
            postfix_paths: Vec::new(),
        }
    }

    /// A store whose length is fixed up front instead of by the first trace.
    pub fn with_length(universe: ApUniverse, policy: LengthPolicy, length: usize) -> Self {
        let mut store = Self::new(universe, policy);
        store.length = Some(length.max(1));
        store
    }

    pub fn universe(&self) -> &ApUniverse {
        &self.universe
    }

    pub fn policy(&self) -> LengthPolicy {
        self.policy
    }

    /// The common trace length, once known.
    pub fn length(&self) -> Option<usize> {
        self.length
    }

    /// The length used for evaluation; an empty store is treated as
    /// having length 1.
    pub fn eval_length(&self) -> usize {
        self.length.unwrap_or(1)
    }

    /// Number of distinct traces ever accepted.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn trace(&self, id: TraceId) -> &Trace {
        &self.traces[id.index()]
    }

    pub fn get(&self, id: TraceId) -> Option<&Trace> {
        self.traces.get(id.index())
    }

    pub fn ids(&self) -> impl Iterator<Item = TraceId> {
        (0..self.traces.len() as u32).map(TraceId)
    }

    pub fn all(&self) -> IdSet {
        IdSet::full(self.traces.len())
    }

    pub fn iter(&self) -> impl Iterator<Item = (TraceId, &Trace)> {
        self.traces
            .iter()
            .enumerate()
            .map(|(k, t)| (TraceId(k as u32), t))
    }

    pub fn find(&self, steps: &[ApSet]) -> Option<TraceId> {
        self.index.get(&Trace::new(steps)).copied()
    }

    /// Normalizes `steps` to the store length according to the policy.
    pub fn normalize(&self, steps: &[ApSet]) -> Result<Trace, TraceError> {
        if steps.is_empty() {
            return Err(TraceError::Empty);
        }
        if let Some(step) = steps.iter().position(|s| !self.universe.admits(*s)) {
            return Err(TraceError::OutsideUniverse { step });
        }
        let m = self.length.unwrap_or(steps.len());
        let mut out: Vec<ApSet> = steps.iter().copied().take(m).collect();
        if out.len() < m {
            match self.policy {
                LengthPolicy::Crop => {
                    return Err(TraceError::TooShort {
                        len: steps.len(),
                        expected: m,
                    })
                }
                LengthPolicy::Pad => out.resize(m, ApSet::EMPTY),
            }
        }
        Ok(Trace::new(out))
    }

    pub fn insert(&mut self, steps: &[ApSet]) -> Result<Insertion, TraceError> {
        let trace = self.normalize(steps)?;
        if let Some(&id) = self.index.get(&trace) {
            return Ok(Insertion::Duplicate(id));
        }
        self.length = Some(trace.len());
        let id = TraceId(self.traces.len() as u32);
        self.prefix.insert(id, trace.steps().iter().copied());
        let path = self.postfix.insert(id, trace.steps().iter().rev().copied());
        self.postfix_paths.push(path);
        self.index.insert(trace.clone(), id);
        self.traces.push(trace);
        self.version += 1;
        Ok(Insertion::Added(id))
    }

    /// Inserts a trace written as `"s;d;r"`.
    pub fn insert_text(&mut self, text: &str) -> Result<Insertion, TraceError> {
        let word = self.universe.word(text)?;
        self.insert(&word)
    }

    /// Partition of all ids by equality of steps `i..m`.
    pub fn suffix_classes(&self, i: usize) -> Vec<Vec<TraceId>> {
        let m = self.eval_length();
        assert!(i < m, "time {i} out of range for length {m}");
        self.postfix.classes(m - i)
    }

    /// Partition of all ids by equality of steps `0..len`.
    pub fn prefix_classes(&self, len: usize) -> Vec<Vec<TraceId>> {
        self.prefix.classes(len)
    }

    /// The postfix-trie node of `id`'s suffix from step `i`; two traces
    /// share the suffix iff they share the node.
    pub fn suffix_class(&self, id: TraceId, i: usize) -> u32 {
        let path = &self.postfix_paths[id.index()];
        path[path.len() - 1 - i]
    }

    /// Ids recorded at the roots of both tries.
    pub fn tree_ids(&self) -> (&[TraceId], &[TraceId]) {
        (&self.prefix.nodes[0].ids, &self.postfix.nodes[0].ids)
    }

    pub fn display(&self, id: TraceId) -> impl fmt::Display + '_ {
        self.universe.display_word(self.trace(id).steps())
    }
}
