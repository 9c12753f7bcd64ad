//! The three-state sender-receiver system.
//!
//! From `s` the system may stay in `s`, move to `d` (delayed) or to `r`
//! (received); `d` moves to `r`, and `r` loops. Each state is labeled
//! with the proposition of the same name.

use alloc::vec::Vec;

use crate::ap::{ApSet, ApUniverse};

pub const APS: [&str; 3] = ["s", "d", "r"];

pub fn universe() -> ApUniverse {
    ApUniverse::from_names(APS).expect("valid names")
}

/// Common knowledge of eventual receipt among both agents.
pub const CK: &str = "forall p in sys. F(r[p] & X r[p]) -> F(fix(X, true => p in X, \
forall q1 in X. forall q2 in sys. (H(s[q1] <-> s[q2]) | H(r[q1] <-> r[q2])) => q2 in X). \
forall p2 in X. F r[p2])";

/// The sender eventually knows that the message was received.
pub const EVENTUAL_KNOWLEDGE: &str =
    "forall p in sys. F(r[p] & X r[p]) -> F(forall q in sys. H(s[p] <-> s[q]) -> F r[q])";

/// The label sequences of all length-`m` paths from `s`.
///
/// Order: `s^k r^(m-k)` and then `s^k d r^(m-k-1)` for k = 1, 2, ..,
/// followed by `s^(m-1) d` and `s^m`.
pub fn traces(m: usize) -> Vec<Vec<ApSet>> {
    assert!(m >= 2, "sender-receiver traces need length at least 2");
    let [s, d, r] = APS.map(|n| universe().letter(&[n]).expect("known name"));
    let word = |parts: &[(ApSet, usize)]| -> Vec<ApSet> {
        parts
            .iter()
            .flat_map(|&(letter, n)| core::iter::repeat(letter).take(n))
            .collect()
    };
    let mut out = Vec::new();
    for k in 1..m {
        out.push(word(&[(s, k), (r, m - k)]));
        if k + 2 <= m {
            out.push(word(&[(s, k), (d, 1), (r, m - k - 1)]));
        }
    }
    out.push(word(&[(s, m - 1), (d, 1)]));
    out.push(word(&[(s, m)]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;

    fn names(m: usize) -> Vec<String> {
        let u = universe();
        traces(m)
            .iter()
            .map(|t| format!("{}", u.display_word(t)).replace(';', ""))
            .collect()
    }

    #[test]
    fn length_three() {
        assert_eq!(names(3), ["srr", "sdr", "ssr", "ssd", "sss"]);
    }

    #[test]
    fn length_two() {
        assert_eq!(names(2), ["sr", "sd", "ss"]);
    }

    /// Brute force over all state sequences of the transition system.
    fn paths(m: usize) -> Vec<String> {
        let next = |c: char| -> &'static [char] {
            match c {
                's' => &['s', 'd', 'r'],
                'd' => &['r'],
                _ => &['r'],
            }
        };
        let mut words: Vec<String> = alloc::vec!["s".into()];
        for _ in 1..m {
            words = words
                .iter()
                .flat_map(|w| next(w.chars().last().unwrap()).iter().map(move |c| format!("{w}{c}")))
                .collect();
        }
        words.sort();
        words.dedup();
        words
    }

    #[test]
    fn matches_transition_system() {
        for m in 2..12 {
            let mut got = names(m);
            assert_eq!(got.len(), 2 * m - 1);
            got.sort();
            assert_eq!(got, paths(m), "m={m}");
            for w in names(m) {
                let prefix = w.chars().take_while(|c| *c == 's').count();
                assert!(w.chars().skip(prefix).all(|c| c != 's'));
            }
        }
    }
}
