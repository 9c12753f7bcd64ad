//! Random traces for comparing the optimizations.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ap::{ApSet, ApUniverse};

pub const APS: [&str; 3] = ["a", "b", "c"];
pub const LENGTH: usize = 12;

pub fn universe() -> ApUniverse {
    ApUniverse::from_names(APS).expect("valid names")
}

/// On some trace, `c` eventually becomes common knowledge between an
/// agent observing `a` and an agent observing `b`.
pub const FORMULA: &str = "exists p in sys. F fix(X, true => p in X, \
forall q1 in X. forall q2 in sys. (H(a[q1] <-> a[q2]) | H(b[q1] <-> b[q2])) => q2 in X). \
forall p2 in X. c[p2]";

/// `n` uniformly random traces of length 12 over `{a, b, c}`.
pub fn traces(seed: u64, n: usize) -> Vec<Vec<ApSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..LENGTH)
                .map(|_| ApSet::from_bits(rng.gen_range(0..8)))
                .collect()
        })
        .collect()
}
