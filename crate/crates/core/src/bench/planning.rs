//! Reachability from random walks in a random graph.
//!
//! A walk starting at the source is known to exist. A walk that meets a
//! known walk is known as well: in time-sensitive mode the two must be at
//! the same node at the same step, in time-insensitive mode at the same
//! node at any steps. The property holds once some known walk visits the
//! target.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ap::{ApSet, ApUniverse};

pub const MAX_NODES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    TimeSensitive,
    TimeInsensitive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::TimeSensitive => "tsen",
            Mode::TimeInsensitive => "tins",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub nodes: usize,
    pub edge_prob: f64,
    pub walk_len: usize,
    pub walks: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Instance {
    /// Successors of each node; every node has a self-loop.
    pub successors: Vec<Vec<usize>>,
    pub source: usize,
    pub target: usize,
    /// Node sequences, in arrival order.
    pub walks: Vec<Vec<usize>>,
}

impl Instance {
    /// A random graph with self-loops, source 0, target `nodes - 1`, and
    /// walks from uniformly random start nodes.
    pub fn random(p: &Params) -> Instance {
        assert!((2..=MAX_NODES).contains(&p.nodes), "2 <= nodes <= {MAX_NODES}");
        assert!(p.walk_len >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let successors: Vec<Vec<usize>> = (0..p.nodes)
            .map(|u| {
                (0..p.nodes)
                    .filter(|&v| v == u || rng.gen_bool(p.edge_prob))
                    .collect()
            })
            .collect();
        let walks = (0..p.walks)
            .map(|_| {
                let mut node = rng.gen_range(0..p.nodes);
                let mut walk = alloc::vec![node];
                for _ in 1..p.walk_len {
                    let next = &successors[node];
                    node = next[rng.gen_range(0..next.len())];
                    walk.push(node);
                }
                walk
            })
            .collect();
        Instance {
            successors,
            source: 0,
            target: p.nodes - 1,
            walks,
        }
    }

    /// An instance given by explicit walks over `nodes` nodes.
    pub fn from_walks(nodes: usize, source: usize, target: usize, walks: Vec<Vec<usize>>) -> Instance {
        let mut successors: Vec<Vec<usize>> = (0..nodes).map(|u| alloc::vec![u]).collect();
        for w in &walks {
            for pair in w.windows(2) {
                if !successors[pair[0]].contains(&pair[1]) {
                    successors[pair[0]].push(pair[1]);
                }
            }
        }
        Instance {
            successors,
            source,
            target,
            walks,
        }
    }

    pub fn nodes(&self) -> usize {
        self.successors.len()
    }

    /// `v0..v(k-1)`, then `src` and `tgt`.
    pub fn universe(&self) -> ApUniverse {
        let names = (0..self.nodes())
            .map(|v| format!("v{v}"))
            .chain(["src".into(), "tgt".into()]);
        ApUniverse::from_names(names).expect("valid names")
    }

    pub fn trace(&self, walk: &[usize]) -> Vec<ApSet> {
        let k = self.nodes();
        walk.iter()
            .enumerate()
            .map(|(t, &v)| {
                let mut bits = 1u64 << v;
                if t == 0 && v == self.source {
                    bits |= 1 << k;
                }
                if v == self.target {
                    bits |= 1 << (k + 1);
                }
                ApSet::from_bits(bits)
            })
            .collect()
    }

    pub fn traces(&self) -> Vec<Vec<ApSet>> {
        self.walks.iter().map(|w| self.trace(w)).collect()
    }

    /// No path from source to target in the graph.
    pub fn disconnected(&self) -> bool {
        let mut seen = alloc::vec![false; self.nodes()];
        let mut stack = alloc::vec![self.source];
        seen[self.source] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.successors[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        !seen[self.target]
    }

    pub fn formula(&self, mode: Mode) -> String {
        let k = self.nodes();
        let meet = match mode {
            Mode::TimeSensitive => {
                let same: Vec<String> = (0..k).map(|v| format!("(v{v}[q1] & v{v}[q2])")).collect();
                format!("F({})", same.join(" | "))
            }
            Mode::TimeInsensitive => {
                let same: Vec<String> = (0..k).map(|v| format!("(F v{v}[q1] & F v{v}[q2])")).collect();
                format!("({})", same.join(" | "))
            }
        };
        format!(
            "fix(K, forall p in sys. src[p] => p in K, \
             forall q1 in K. forall q2 in sys. {meet} => q2 in K). exists p2 in K. F tgt[p2]"
        )
    }
}

/// Direct closure over the walks themselves.
pub fn oracle(instance: &Instance, walks: &[Vec<usize>], mode: Mode) -> bool {
    let meets = |a: &[usize], b: &[usize]| match mode {
        Mode::TimeSensitive => a.iter().zip(b).any(|(x, y)| x == y),
        Mode::TimeInsensitive => a.iter().any(|x| b.contains(x)),
    };
    let mut known: Vec<bool> = walks.iter().map(|w| w[0] == instance.source).collect();
    let mut frontier: Vec<usize> = (0..walks.len()).filter(|&k| known[k]).collect();
    while let Some(a) = frontier.pop() {
        for b in 0..walks.len() {
            if !known[b] && meets(&walks[a], &walks[b]) {
                known[b] = true;
                frontier.push(b);
            }
        }
    }
    (0..walks.len()).any(|k| known[k] && walks[k].contains(&instance.target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::build;
    use crate::eval::{Evaluator, Options};
    use crate::monotonicity::{compute_mon_map, Marks};
    use crate::traces::{LengthPolicy, TraceStore};

    fn check(instance: &Instance, walks: &[Vec<usize>], mode: Mode) -> bool {
        let u = instance.universe();
        let f = build(&instance.formula(mode), &u);
        let mut store = TraceStore::new(u, LengthPolicy::Pad);
        for w in walks {
            store.insert(&instance.trace(w)).unwrap();
        }
        Evaluator::new(f, Options::all()).check(&store).unwrap()
    }

    #[test]
    fn combining_two_walks() {
        // a b c and b b d: they meet at b at step 1.
        let walks = alloc::vec![alloc::vec![0, 1, 2], alloc::vec![1, 1, 3]];
        let instance = Instance::from_walks(4, 0, 3, walks.clone());
        for mode in [Mode::TimeSensitive, Mode::TimeInsensitive] {
            assert!(!check(&instance, &walks[..1], mode));
            assert!(check(&instance, &walks, mode));
            assert!(oracle(&instance, &walks, mode));
        }
    }

    #[test]
    fn no_source_walk() {
        let walks = alloc::vec![alloc::vec![1, 2, 3]];
        let instance = Instance::from_walks(4, 0, 3, walks.clone());
        assert!(!check(&instance, &walks, Mode::TimeSensitive));
        assert!(!oracle(&instance, &walks, Mode::TimeSensitive));
    }

    #[test]
    fn time_insensitive_meets_more() {
        // Both visit node 1, at different steps.
        let walks = alloc::vec![alloc::vec![0, 1, 0], alloc::vec![2, 3, 1]];
        let instance = Instance::from_walks(4, 0, 3, walks.clone());
        assert!(!check(&instance, &walks, Mode::TimeSensitive));
        assert!(check(&instance, &walks, Mode::TimeInsensitive));
    }

    #[test]
    fn formula_is_plus() {
        let instance = Instance::random(&Params {
            nodes: 5,
            edge_prob: 0.3,
            walk_len: 4,
            walks: 3,
            seed: 1,
        });
        let f = build(&instance.formula(Mode::TimeSensitive), &instance.universe());
        assert_eq!(compute_mon_map(&f).get(f.root()), Marks::PLUS);
    }

    #[test]
    fn walks_follow_edges() {
        for seed in 0..20 {
            let instance = Instance::random(&Params {
                nodes: 8,
                edge_prob: 0.2,
                walk_len: 6,
                walks: 10,
                seed,
            });
            for w in &instance.walks {
                assert_eq!(w.len(), 6);
                for pair in w.windows(2) {
                    assert!(instance.successors[pair[0]].contains(&pair[1]));
                }
                let t = instance.trace(w);
                let src = instance.universe().get("src").unwrap();
                assert_eq!(t[0].contains(src), w[0] == 0);
                assert!(t[1..].iter().all(|s| !s.contains(src)));
            }
        }
    }
}
