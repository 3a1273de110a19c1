mod common;

use common::{arb_regex, arb_tree, words, Shape};
use proptest::prelude::*;
use remedy_core::ast::{parse, Kind, Node};
use remedy_core::matcher::{step, time, CaptureMap, Matcher};
use std::collections::BTreeSet;

fn results(re: &str, w: &str) -> BTreeSet<(usize, Vec<(u32, String)>)> {
    step(&parse(re).unwrap(), w, 0, &CaptureMap::new())
        .unwrap()
        .states
        .into_iter()
        .map(|s| (s.pos, s.captures.into_iter().collect()))
        .collect()
}

#[test]
fn nested_star_positions() {
    let got: Vec<usize> = results("(?:a*)*", "ab").into_iter().map(|s| s.0).collect();
    assert_eq!(got, vec![0, 1]);
    assert!(!Matcher::new(&parse("(a*)*").unwrap()).accepts("ab").unwrap());
}

#[test]
fn lookahead_under_star() {
    let got: Vec<usize> = results("(?:(?=a)*)*", "ab").into_iter().map(|s| s.0).collect();
    assert_eq!(got, vec![0]);
    assert!(!Matcher::new(&parse("((?=a)*)*").unwrap()).accepts("ab").unwrap());
}

#[test]
fn backreference_doubles() {
    let got = results(r"(a*)\1", "aa");
    let want: BTreeSet<_> = [
        (0, vec![(1, String::new())]),
        (2, vec![(1, "a".to_string())]),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, want);
}

#[test]
fn unset_backreference_fails() {
    assert!(results(r"(?:(a)|b)\1", "b").is_empty());
}

#[test]
fn lookbehind_windows() {
    let m = Matcher::new(&parse("a(?<=a)b").unwrap());
    assert!(m.accepts("ab").unwrap());
    let m = Matcher::new(&parse("(?<=a)b").unwrap());
    assert!(!m.accepts("b").unwrap());
    let m = Matcher::new(&parse("(?<!a)b").unwrap());
    assert!(m.accepts("b").unwrap());
    let m = Matcher::new(&parse("ab(?<=ab)").unwrap());
    assert!(m.accepts("ab").unwrap());
}

#[test]
fn negative_lookahead_discards_captures() {
    let got = results("(?!(a))b", "b");
    assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![(1, vec![])]);
    let got = results("(?=(a))", "a");
    assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![(0, vec![(1, "a".to_string())])]);
}

#[test]
fn derivation_sizes() {
    assert_eq!(time(&parse("a").unwrap(), "b").unwrap(), 1);
    assert_eq!(time(&parse("a").unwrap(), "a").unwrap(), 1);
    assert_eq!(time(&parse("ab").unwrap(), "ab").unwrap(), 3);
}

/// Reference evaluator for the regular fragment: end positions reachable
/// from `p` under the standard language semantics.
fn ends(n: &Node, w: &[char], p: usize) -> BTreeSet<usize> {
    match &n.kind {
        Kind::Set(c) => (p < w.len() && c.contains(w[p])).then_some(p + 1).into_iter().collect(),
        Kind::Epsilon => [p].into_iter().collect(),
        Kind::Concat(a, b) => ends(a, w, p).into_iter().flat_map(|q| ends(b, w, q)).collect(),
        Kind::Union(a, b) => ends(a, w, p).union(&ends(b, w, p)).copied().collect(),
        Kind::Star(a) => {
            let mut seen: BTreeSet<usize> = [p].into_iter().collect();
            let mut todo = vec![p];
            while let Some(q) = todo.pop() {
                for r in ends(a, w, q) {
                    if seen.insert(r) {
                        todo.push(r);
                    }
                }
            }
            seen
        }
        Kind::Capture(_, a) => ends(a, w, p),
        _ => unreachable!("regular fragment only"),
    }
}

fn regular_fragment(n: &Node) -> bool {
    !n.any_node(&|m| matches!(m.kind, Kind::Backref(_) | Kind::Look(..) | Kind::Hole(_)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn regular_fragment_matches_reference(r in arb_regex().prop_filter("regular", regular_fragment)) {
        let m = Matcher::new(&r);
        for w in words(4) {
            let cs: Vec<char> = w.chars().collect();
            prop_assert_eq!(m.accepts(&w).unwrap(), ends(&r, &cs, 0).contains(&cs.len()), "{} on {:?}", r, w);
        }
    }

    #[test]
    fn memoized_membership_agrees_with_full_results(r in arb_regex()) {
        let m = Matcher::new(&r);
        for w in words(3) {
            let full = m.step(&w, 0, &CaptureMap::new()).unwrap();
            let n = w.chars().count();
            prop_assert_eq!(m.accepts(&w).unwrap(), full.states.iter().any(|s| s.pos == n));
        }
    }

    #[test]
    fn results_stay_in_range_and_size_is_positive(r in arb_regex()) {
        for w in words(3) {
            let res = step(&r, &w, 0, &CaptureMap::new()).unwrap();
            prop_assert!(res.derivation_size >= 1);
            prop_assert!(res.states.iter().all(|s| s.pos <= w.chars().count()));
            let caps = r.captures();
            prop_assert!(res.states.iter().all(|s| s.captures.keys().all(|k| caps.contains(k))));
        }
    }

    #[test]
    fn union_is_commutative_on_results(
        a in arb_tree(Shape { size: 8, ..Shape::REGEX }),
        b in arb_tree(Shape { size: 8, ..Shape::REGEX }),
    ) {
        let mut b = b;
        b.shift_captures(a.max_capture());
        let ab = Node::union(a.clone(), b.clone());
        let ba = Node::union(b, a);
        for w in words(3) {
            let set = |n: &Node| -> BTreeSet<(usize, CaptureMap)> {
                step(n, &w, 0, &CaptureMap::new()).unwrap().states.into_iter().map(|s| (s.pos, s.captures)).collect()
            };
            prop_assert_eq!(set(&ab), set(&ba));
        }
    }
}
