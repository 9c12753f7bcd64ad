use super::*;
use crate::ap::ApUniverse;
use crate::syntax::compile;
use crate::traces::LengthPolicy;

const EX43: &str = "forall p in sys. exists q in sys. (p != q & G(a[p] <-> a[q])) | exists r in sys. F b[r]";

const CK: &str = "forall p in sys. F(r[p] & X r[p]) -> F(fix(X, true => p in X, \
    forall q1 in X. forall q2 in sys. (H(s[q1] <-> s[q2]) | H(r[q1] <-> r[q2])) => q2 in X). \
    forall p2 in X. F r[p2])";

fn setup(text: &str, aps: &[&str]) -> (Formula, TraceStore) {
    let mut u = ApUniverse::from_names(aps).unwrap();
    let f = compile(text, &mut u).unwrap();
    let store = TraceStore::new(u, LengthPolicy::Pad);
    (f, store)
}

fn check_all_configs(f: &Formula, store: &TraceStore) -> bool {
    let results: Vec<bool> = Options::combinations()
        .map(|o| Evaluator::new(f.clone(), o).check(store).unwrap())
        .collect();
    assert!(results.iter().all(|r| *r == results[0]), "{results:?}");
    results[0]
}

#[test]
fn example_vectors_with_inequality() {
    let (f, mut store) = setup(EX43, &["a", "b", "c"]);
    store.insert_text("a,c;a,c;a,c").unwrap();
    store.insert_text("a;a;a").unwrap();
    assert!(check_all_configs(&f, &store));
    store.insert_text("c;c;c").unwrap();
    assert!(!check_all_configs(&f, &store));
    store.insert_text("b;b;b").unwrap();
    assert!(check_all_configs(&f, &store));
}

#[test]
fn incremental_evaluator_follows_growing_store() {
    let (f, mut store) = setup(EX43, &["a", "b", "c"]);
    let mut ev = Evaluator::new(f, Options::all());
    let mut got = Vec::new();
    for t in ["a,c;a,c;a,c", "a;a;a", "c;c;c", "b;b;b"] {
        store.insert_text(t).unwrap();
        got.push(ev.check(&store).unwrap());
    }
    assert_eq!(got, [false, true, false, true]);
}

#[test]
fn quantifiers_over_empty_store() {
    let (f, store) = setup("forall p in sys. a[p]", &["a"]);
    assert!(check_all_configs(&f, &store));
    let (f, store) = setup("exists p in sys. a[p]", &["a"]);
    assert!(!check_all_configs(&f, &store));
}

#[test]
fn strong_next_at_last_step() {
    let (f, mut store) = setup("forall p in sys. X true", &["a"]);
    store.insert_text("a").unwrap();
    assert!(!check_all_configs(&f, &store));
    let (f, mut store) = setup("forall p in sys. X X !a[p]", &["a"]);
    store.insert_text("a;a").unwrap();
    assert!(!check_all_configs(&f, &store));
}

#[test]
fn eventual_knowledge_holds_on_sender_receiver() {
    let text = "forall p in sys. F(r[p] & X r[p]) -> F(forall q in sys. H(s[p] <-> s[q]) -> F r[q])";
    for m in 4..=8 {
        let (f, mut store) = setup(text, &["s", "d", "r"]);
        for t in crate::bench::sender_receiver::traces(m) {
            store.insert(&t).unwrap();
        }
        assert!(check_all_configs(&f, &store), "m={m}");
    }
}

#[test]
fn ck_fixpoint_on_length_three() {
    let (f, mut store) = setup(CK, &["s", "d", "r"]);
    for t in ["s;r;r", "s;d;r", "s;s;r", "s;s;d", "s;s;s"] {
        store.insert_text(t).unwrap();
    }
    let fix = f.find(|n| matches!(n, Node::Fix { .. })).unwrap();
    let p = f.trace_var("p").unwrap();
    let ctx = EvalContext::at(2).with_trace(p, TraceId(0));
    for options in Options::combinations() {
        let mut ev = Evaluator::new(f.clone(), options);
        let sol = ev.compute_fix(&store, fix, &ctx, &IdSet::new()).unwrap();
        let names: Vec<_> = sol
            .iter()
            .map(|id| alloc::format!("{}", store.display(id)))
            .collect();
        // ssd and sss have the same r-history, so the chain reaches sss too.
        assert_eq!(names, ["s;r;r", "s;d;r", "s;s;r", "s;s;d", "s;s;s"]);
    }
    assert!(!check_all_configs(&f, &store));
}

#[test]
fn fix_without_seeding_constraint_is_empty() {
    let text = "exists p in sys. fix(X, forall q in X. a[q] => q in X). forall r in X. false";
    let (f, mut store) = setup(text, &["a"]);
    store.insert_text("a;a").unwrap();
    let fix = f.find(|n| matches!(n, Node::Fix { .. })).unwrap();
    let mut ev = Evaluator::new(f.clone(), Options::all());
    let sol = ev
        .compute_fix(&store, fix, &EvalContext::root().with_trace(f.trace_var("p").unwrap(), TraceId(0)), &IdSet::new())
        .unwrap();
    assert!(sol.is_empty());
    assert!(check_all_configs(&f, &store));
}

#[test]
fn seeding_constraint_adds_bound_trace() {
    let text = "exists p in sys. fix(X, true => p in X). exists q in X. a[q]";
    let (f, mut store) = setup(text, &["a"]);
    store.insert_text(";").unwrap();
    let id = store.insert_text("a;").unwrap().id();
    let fix = f.find(|n| matches!(n, Node::Fix { .. })).unwrap();
    let ctx = EvalContext::root().with_trace(f.trace_var("p").unwrap(), id);
    let sol = Evaluator::new(f.clone(), Options::none())
        .compute_fix(&store, fix, &ctx, &IdSet::new())
        .unwrap();
    assert_eq!(sol.iter().collect::<Vec<_>>(), [id]);
    assert!(check_all_configs(&f, &store));
}

#[test]
fn empty_set_witness() {
    let (f, mut store) = setup("exists X. forall p in X. false", &["a"]);
    assert!(check_all_configs(&f, &store));
    store.insert_text("a").unwrap();
    assert!(check_all_configs(&f, &store));
}

#[test]
fn subset_bound_is_enforced() {
    let (f, mut store) = setup("exists X. forall p in X. a[p]", &["a", "b", "c"]);
    for bits in 0..8u64 {
        store.insert(&[crate::ap::ApSet::from_bits(bits)]).unwrap();
    }
    let mut options = Options::all();
    options.subset_bound = 7;
    let err = Evaluator::new(f.clone(), options).check(&store).unwrap_err();
    assert_eq!(err, EvalError::SubsetBound { size: 8, bound: 7 });
    assert!(alloc::format!("{err}").contains("--subset-bound"));
    options.subset_bound = 8;
    assert!(Evaluator::new(f, options).check(&store).unwrap());
}

#[test]
fn unassigned_and_out_of_range() {
    let (f, mut store) = setup("forall p in sys. X a[p]", &["a"]);
    store.insert_text("a;a").unwrap();
    let mut ev = Evaluator::new(f, Options::all());
    let err = ev.check_at(&store, NodeId(1), &EvalContext::root()).unwrap_err();
    assert_eq!(err, EvalError::Unassigned { name: "p".into() });
    let err = ev.check_at(&store, NodeId(0), &EvalContext::at(2)).unwrap_err();
    assert_eq!(err, EvalError::TimeOutOfRange { time: 2, length: 2 });
}

#[test]
fn until_and_since() {
    let (f, mut store) = setup("forall p in sys. a[p] U b[p]", &["a", "b"]);
    store.insert_text("a;a;b").unwrap();
    assert!(check_all_configs(&f, &store));
    store.insert_text("a;;b").unwrap();
    assert!(!check_all_configs(&f, &store));
    let (f, mut store) = setup("forall p in sys. X X (a[p] S b[p])", &["a", "b"]);
    store.insert_text("b;a;a").unwrap();
    assert!(check_all_configs(&f, &store));
    store.insert_text("b;;a").unwrap();
    assert!(!check_all_configs(&f, &store));
}

#[test]
fn sat_hash_reuses_marked_results() {
    // `forall p in sys. a[p]` is `-`: once false, no recomputation.
    let (f, mut store) = setup("forall p in sys. a[p]", &["a"]);
    let mut ev = Evaluator::new(f, Options::all());
    store.insert_text(";").unwrap();
    assert!(!ev.check(&store).unwrap());
    store.insert_text("a;").unwrap();
    let before = ev.counters();
    assert!(!ev.check(&store).unwrap());
    let delta = ev.counters() - before;
    assert_eq!(delta.check_calls, 1);
    assert_eq!(delta.sat_hits, 1);
}

#[test]
fn witness_is_tried_first() {
    let (f, mut store) = setup("exists p in sys. a[p]", &["a"]);
    let mut ev = Evaluator::new(f, Options::from_mask(0b0100));
    store.insert_text("a").unwrap();
    assert!(ev.check(&store).unwrap());
    store.insert(&[crate::ap::ApSet::EMPTY]).unwrap();
    assert!(ev.check(&store).unwrap());
    assert_eq!(ev.counters().wit_hits, 1);
}

#[test]
fn fix_hash_seeds_later_versions() {
    let (f, mut store) = setup(CK, &["s", "d", "r"]);
    let mut ev = Evaluator::new(f, Options::from_mask(0b0010));
    for t in ["s;r;r", "s;d;r"] {
        store.insert_text(t).unwrap();
        ev.check(&store).unwrap();
    }
    assert!(ev.counters().fix_seeds > 0);
}
