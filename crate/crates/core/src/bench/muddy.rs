//! The muddy children puzzle.
//!
//! Child `i` is muddy when `m_i` holds and has declared when `d_i` holds.
//! Muddiness is constant along a trace. With `k` muddy children, all of
//! them declare at step `k + 1` and keep declaring; clean children never
//! declare. There is one trace per muddiness vector, of length `n + 2`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ap::{ApSet, ApUniverse};

pub const MAX_CHILDREN: usize = 8;

/// `m1..mn` followed by `d1..dn`.
pub fn universe(n: usize) -> ApUniverse {
    let names = (1..=n).map(|i| format!("m{i}")).chain((1..=n).map(|i| format!("d{i}")));
    ApUniverse::from_names(names).expect("valid names")
}

/// The protocol trace for a muddiness vector (bit `i` is child `i + 1`).
pub fn trace(n: usize, muddy: u32) -> Vec<ApSet> {
    let k = muddy.count_ones() as usize;
    let mut base = 0u64;
    let mut declared = 0u64;
    for i in 0..n {
        if muddy >> i & 1 == 1 {
            base |= 1 << i;
            declared |= 1 << (n + i);
        }
    }
    (0..n + 2)
        .map(|t| {
            let bits = if k > 0 && t > k { base | declared } else { base };
            ApSet::from_bits(bits)
        })
        .collect()
}

/// All `2^n` protocol traces, by muddiness vector.
pub fn traces(n: usize) -> Vec<Vec<ApSet>> {
    assert!((1..=MAX_CHILDREN).contains(&n), "1 <= n <= {MAX_CHILDREN}");
    (0..1u32 << n).map(|v| trace(n, v)).collect()
}

/// The protocol traces in an order shuffled by `seed`.
pub fn stream(n: usize, seed: u64) -> Vec<Vec<ApSet>> {
    let mut all = traces(n);
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    all
}

/// Muddiness of all children is common knowledge after `b` steps.
pub fn formula(n: usize, b: usize) -> String {
    assert!((1..=MAX_CHILDREN).contains(&n), "1 <= n <= {MAX_CHILDREN}");
    assert!(b <= n + 1, "bound {b} exceeds n + 1");
    let observations: Vec<String> = (1..=n)
        .map(|i| {
            let aps = (1..=n)
                .map(|j| format!("d{j}"))
                .chain((1..=n).filter(|&j| j != i).map(|j| format!("m{j}")));
            let eqs: Vec<String> = aps.map(|a| format!("({a}[q1] <-> {a}[q2])")).collect();
            format!("H({})", eqs.join(" & "))
        })
        .collect();
    let agree: Vec<String> = (1..=n).map(|j| format!("(m{j}[r1] <-> m{j}[r2])")).collect();
    format!(
        "forall p in sys. {}fix(K, true => p in K, forall q1 in K. forall q2 in sys. ({}) => q2 in K). \
         forall r1 in K. forall r2 in K. {}",
        "X ".repeat(b),
        observations.join(" | "),
        agree.join(" & ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::build;
    use crate::eval::{Evaluator, Options};
    use crate::traces::{LengthPolicy, TraceStore};

    #[test]
    fn protocol_shape() {
        let u = universe(3);
        assert_eq!(traces(3).len(), 8);
        assert_eq!(alloc::format!("{}", u.display_word(&trace(3, 0))), ";;;;");
        assert_eq!(
            alloc::format!("{}", u.display_word(&trace(3, 0b011))),
            "m1,m2;m1,m2;m1,m2;m1,m2,d1,d2;m1,m2,d1,d2"
        );
    }

    #[test]
    fn full_set_check_small() {
        for (n, b, expected) in [(2, 1, false), (2, 2, true), (3, 2, false), (3, 3, true)] {
            let u = universe(n);
            let f = build(&formula(n, b), &u);
            let mut store = TraceStore::new(u, LengthPolicy::Pad);
            for t in traces(n) {
                store.insert(&t).unwrap();
            }
            let got = Evaluator::new(f, Options::all()).check(&store).unwrap();
            assert_eq!(got, expected, "n={n} b={b}");
        }
    }
}
