//! The linear-time property: a determinism condition on the bracket paths of
//! the lookaround-free expression, plus repetition-freedom inside lookarounds.

mod bracket;
mod nfa;

pub use bracket::{bracket, BNode, Bracketed};
pub use nfa::{
    bracket_paths, first, path_string, reach, translate, Bracket, BracketNfa, Edge, FirstEntry,
    GadgetReach, Label, PathCount,
};

use crate::ast::{remove_lookarounds, CharSet, Kind, Node};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Two distinct bracket paths reach the symbol.
    Paths { first: String, second: String },
    /// A cycle of bracket/ε edges leads to the symbol: infinitely many paths.
    Cycle { path: String },
    /// A lookaround body contains a repetition.
    RepetitionInLookaround,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Bracket index (preorder, from 1) of the offending subexpression.
    pub bracket: u32,
    /// A character both paths can read, when the violation is about paths.
    pub symbol: Option<char>,
    #[serde(flatten)]
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LtpVerdict {
    pub satisfies: bool,
    pub witness: Option<Witness>,
}

impl LtpVerdict {
    fn ok() -> LtpVerdict {
        LtpVerdict {
            satisfies: true,
            witness: None,
        }
    }

    fn violated(w: Witness) -> LtpVerdict {
        LtpVerdict {
            satisfies: false,
            witness: Some(w),
        }
    }
}

/// Union of the concrete sets among `labels`. Holes read nothing.
pub fn concrete(labels: &[Label]) -> CharSet {
    labels.iter().fold(CharSet::empty(), |acc, l| match l {
        Label::Set(c) => acc.union(c),
        Label::Hole(_) => acc,
    })
}

/// Automaton of the lookaround-free expression.
pub fn automaton(r: &Node) -> BracketNfa {
    translate(&bracket(&remove_lookarounds(r)))
}

pub fn check_ltp(r: &Node) -> LtpVerdict {
    let mut look_index = None;
    let mut k = 0;
    r.preorder(&mut |n| {
        k += 1;
        if look_index.is_none() && matches!(&n.kind, Kind::Look(_, b) if b.has_star()) {
            look_index = Some(k);
        }
    });
    if let Some(bracket) = look_index {
        return LtpVerdict::violated(Witness {
            bracket,
            symbol: None,
            evidence: Evidence::RepetitionInLookaround,
        });
    }
    let nfa = automaton(r);
    for &(index, q) in &nfa.open_state {
        let gadgets = reach(&nfa, q);
        let sets: Vec<CharSet> = gadgets.iter().map(|g| concrete(&g.labels)).collect();
        for (g, set) in gadgets.iter().zip(&sets) {
            if set.is_empty() || g.count == PathCount::One {
                continue;
            }
            let symbol = set.first();
            let evidence = if g.count == PathCount::Infinite {
                let path = bracket_paths(&nfa, q, g.source, 1)
                    .first()
                    .map(|p| path_string(p))
                    .unwrap_or_default();
                Evidence::Cycle { path }
            } else {
                let ps = bracket_paths(&nfa, q, g.source, 2);
                Evidence::Paths {
                    first: path_string(&ps[0]),
                    second: path_string(&ps[1]),
                }
            };
            return LtpVerdict::violated(Witness {
                bracket: index,
                symbol,
                evidence,
            });
        }
        for i in 0..gadgets.len() {
            for j in i + 1..gadgets.len() {
                let both = sets[i].intersect(&sets[j]);
                if both.is_empty() {
                    continue;
                }
                let one = |g: &GadgetReach| {
                    bracket_paths(&nfa, q, g.source, 1)
                        .first()
                        .map(|p| path_string(p))
                        .unwrap_or_default()
                };
                return LtpVerdict::violated(Witness {
                    bracket: index,
                    symbol: both.first(),
                    evidence: Evidence::Paths {
                        first: one(&gadgets[i]),
                        second: one(&gadgets[j]),
                    },
                });
            }
        }
    }
    LtpVerdict::ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse;

    fn ltp(s: &str) -> bool {
        check_ltp(&parse(s).unwrap()).satisfies
    }

    #[test]
    fn verdict_table() {
        assert!(!ltp("(a*)*"));
        assert!(!ltp(r"(a*)\1"));
        assert!(!ltp("a|aa"));
        assert!(ltp("((?=a)*)*"));
        assert!(ltp("(a*)(b*)"));
        assert!(!ltp(".*.*=.*"));
        assert!(!ltp("((?=.*).)*"));
        assert!(ltp("[^=]*=.*"));
    }

    #[test]
    fn nested_star_reports_cycle() {
        let v = check_ltp(&parse("(?:a*)*").unwrap());
        let w = v.witness.unwrap();
        assert_eq!(w.bracket, 1);
        assert_eq!(w.symbol, Some('a'));
        assert!(matches!(w.evidence, Evidence::Cycle { .. }));
    }

    #[test]
    fn backref_reports_two_paths() {
        let v = check_ltp(&parse(r"(a*)\1").unwrap());
        let w = v.witness.unwrap();
        assert_eq!(w.bracket, 1);
        match w.evidence {
            Evidence::Paths { first, second } => {
                let mut got = [first, second];
                got.sort();
                assert_eq!(got, ["[1[2[3[4".to_string(), "[1[2[3]3]2[5".to_string()]);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn capture_origin_is_total() {
        let r = parse(r"(a)(b(c))\1\3").unwrap();
        let nfa = automaton(&r);
        let mut keys: Vec<u32> = nfa.capture_origin.keys().copied().collect();
        keys.sort();
        assert_eq!(keys, vec![1, 2, 3]);
    }

    #[test]
    fn first_of_union_with_holes() {
        let r = parse(r"(□1|□2|a)b\1").unwrap();
        let nfa = automaton(&r);
        let q = nfa.capture_origin[&1];
        let mut got: Vec<(String, Vec<Label>)> = first(&nfa, q)
            .into_iter()
            .map(|e| (path_string(&e.path), e.labels))
            .collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(got.len(), 3);
        assert!(got.iter().all(|(_, ls)| ls.len() == 1));
        assert!(got.iter().any(|(_, ls)| ls[0] == Label::Hole(1)));
        assert!(got.iter().any(|(_, ls)| ls[0] == Label::Hole(2)));
        assert!(got.iter().any(|(_, ls)| ls[0] == Label::Set(CharSet::single('a'))));
    }

    #[test]
    fn nested_star_first_is_infinite() {
        let nfa = automaton(&parse("(?:a*)*").unwrap());
        let q = nfa.open_state[0].1;
        let f = first(&nfa, q);
        assert_eq!(f.len(), 1);
        assert!(f[0].infinite);
    }
}
