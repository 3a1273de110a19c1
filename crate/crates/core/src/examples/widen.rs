use crate::ast::{Kind, Node, RelevantAlphabet};
use crate::ltp::check_ltp;
use crate::matcher::Matcher;

fn consistent(r: &Node, pos: &[String], neg: &[String]) -> bool {
    let m = Matcher::new(r);
    pos.iter().all(|w| m.accepts(w) == Ok(true)) && neg.iter().all(|w| m.accepts(w) == Ok(false))
}

/// Greedily adds classes of `alphabet` to the character sets of `r`, in
/// preorder and class order, keeping each addition that leaves `r`
/// consistent with the examples and linear-time. Passes repeat until nothing
/// changes, so the result is a fixpoint.
pub fn widen_char_sets(r: &Node, pos: &[String], neg: &[String], alphabet: &RelevantAlphabet) -> Node {
    let mut cur = r.clone();
    let mut paths = Vec::new();
    cur.preorder_paths(&mut |path, n| {
        if let Kind::Set(_) = n.kind {
            paths.push(path.to_vec());
        }
    });
    loop {
        let mut changed = false;
        for path in &paths {
            for class in alphabet.classes() {
                let Kind::Set(set) = &cur.at(path).kind else { unreachable!() };
                if class.is_subset(set) {
                    continue;
                }
                let wider = Node::set(set.union(class)).with_span(cur.at(path).span);
                let candidate = cur.replaced(path, wider);
                if consistent(&candidate, pos, neg) && check_ltp(&candidate).satisfies {
                    cur = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{parse, CharSet};

    #[test]
    fn widens_toward_complement() {
        let r = parse("[a]*=.*").unwrap();
        let pos: Vec<String> = ["=", "abcd==", "==abcd", "ab=c"].map(String::from).to_vec();
        let pos: Vec<String> = pos.into_iter().filter(|w| Matcher::new(&r).accepts(w).unwrap()).collect();
        let neg = vec!["abc".to_string()];
        let alpha = RelevantAlphabet::new(&parse(".*.*=.*").unwrap(), ["abcd==", "abc", "ab=c"]);
        let w = widen_char_sets(&r, &pos, &neg, &alpha);
        let Kind::Concat(ref head, _) = w.kind else { panic!() };
        let Kind::Concat(ref star, _) = head.kind else { panic!() };
        let Kind::Star(ref set) = star.kind else { panic!() };
        let Kind::Set(ref s) = set.kind else { panic!() };
        assert!(!s.contains('='));
        assert_eq!(*s, CharSet::single('=').complement());
        assert_eq!(widen_char_sets(&w, &pos, &neg, &alpha), w);
    }
}
