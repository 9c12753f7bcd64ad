use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use somon_core::random::{self, FormulaParams};
use somon_core::syntax::{compile_surface, parse, print_surface};
use somon_core::{compile, Evaluator, LengthPolicy, Monitor, Options, TraceStore, Verdict};

fn store(traces: &[Vec<somon_core::ApSet>]) -> TraceStore {
    let mut s = TraceStore::new(random::universe(3), LengthPolicy::Pad);
    for t in traces {
        s.insert(t).unwrap();
    }
    s
}

fn store_of_length(len: usize, traces: &[Vec<somon_core::ApSet>]) -> TraceStore {
    let mut s = TraceStore::with_length(random::universe(3), LengthPolicy::Pad, len);
    for t in traces {
        s.insert(t).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn surface_printing_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random::surface(&mut rng, FormulaParams::default());
        prop_assert_eq!(parse(&print_surface(&s)).unwrap(), s);
    }

    #[test]
    fn desugaring_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, f) = random::formula(&mut rng, FormulaParams::default());
        let mut u = random::universe(3);
        let again = compile(&f.to_string(), &mut u).unwrap();
        prop_assert_eq!(again.to_string(), f.to_string());
    }

    #[test]
    fn desugaring_preserves_truth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random::surface(&mut rng, FormulaParams { fix: false, ..FormulaParams::default() });
        let mut u = random::universe(3);
        let f = compile_surface(&s, &mut u).unwrap();
        let traces = random::traces(&mut rng, 3, 5, 4);
        let st = store(&traces);
        let printed = compile(&f.to_string(), &mut u).unwrap();
        prop_assert_eq!(
            somon_core::oracle::naive_check(&f, &st).unwrap(),
            somon_core::oracle::naive_check(&printed, &st).unwrap()
        );
    }

    /// A root mark promises the result persists on every superset.
    #[test]
    fn root_marks_persist(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, f) = random::formula(&mut rng, FormulaParams::default());
        let marks = Evaluator::new(f.clone(), Options::none()).mon_map().get(f.root());
        let len = rand::Rng::gen_range(&mut rng, 1..=4);
        let small: Vec<_> = (0..rand::Rng::gen_range(&mut rng, 0..=4)).map(|_| random::word(&mut rng, 3, len)).collect();
        let mut large = small.clone();
        for _ in 0..rand::Rng::gen_range(&mut rng, 0..=3) {
            large.push(random::word(&mut rng, 3, len));
        }
        let before = Evaluator::new(f.clone(), Options::all()).check(&store_of_length(len, &small)).unwrap();
        let after = Evaluator::new(f.clone(), Options::all()).check(&store_of_length(len, &large)).unwrap();
        if before && marks.plus() {
            prop_assert!(after, "{}", f);
        }
        if !before && marks.minus() {
            prop_assert!(!after, "{}", f);
        }
    }

    #[test]
    fn final_verdicts_are_stable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, f) = random::formula(&mut rng, FormulaParams::default());
        let traces = random::traces(&mut rng, 3, 6, 4);
        let mut monitor = Monitor::new(f.clone(), LengthPolicy::Pad, Options::all());
        let mut fed = Vec::new();
        for t in &traces {
            fed.push(t.clone());
            if monitor.feed(t).unwrap().is_final() {
                break;
            }
        }
        let verdict = monitor.finish().unwrap().verdict;
        if verdict.is_final() {
            let len = fed[0].len();
            for _ in 0..3 {
                fed.push(random::word(&mut rng, 3, len));
            }
            let later = Evaluator::new(f.clone(), Options::none()).check(&store(&fed)).unwrap();
            prop_assert_eq!(later, verdict == Verdict::Sat);
        }
    }

    #[test]
    fn verdicts_do_not_depend_on_options(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, f) = random::formula(&mut rng, FormulaParams::default());
        let traces = random::traces(&mut rng, 3, 6, 4);
        let run = |options| {
            let mut m = Monitor::new(f.clone(), LengthPolicy::Pad, options);
            let mut out = Vec::new();
            for t in &traces {
                match m.feed(t) {
                    Ok(v) => out.push(v),
                    Err(_) => break,
                }
            }
            out
        };
        let reference = run(Options::none());
        for options in Options::combinations() {
            prop_assert_eq!(run(options), reference.clone());
        }
    }
}
