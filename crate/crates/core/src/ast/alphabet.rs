use super::{CharSet, Node};

/// A finite partition of the character universe into classes such that every
/// character set of the expression is a union of classes and every example
/// character is a class of its own.
///
/// Characters in the same class are indistinguishable to the expression, so
/// boolean variables per (hole, class) suffice to describe every hole filling
/// that matters. A class with more than one member plays the role of the
/// "any other character" symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevantAlphabet {
    classes: Vec<CharSet>,
}

impl RelevantAlphabet {
    pub fn new<'a>(r: &Node, examples: impl IntoIterator<Item = &'a str>) -> RelevantAlphabet {
        let mut sets: Vec<CharSet> = r.charsets().into_iter().cloned().collect();
        for w in examples {
            sets.extend(w.chars().map(CharSet::single));
        }
        RelevantAlphabet::from_sets(&sets)
    }

    /// Coarsest partition refining every given set.
    pub fn from_sets(sets: &[CharSet]) -> RelevantAlphabet {
        let mut blocks = vec![CharSet::full()];
        for s in sets {
            if s.is_empty() || s.is_full() {
                continue;
            }
            let mut next = Vec::with_capacity(blocks.len() + 1);
            for b in blocks {
                let inside = b.intersect(s);
                if inside.is_empty() || inside == b {
                    next.push(b);
                } else {
                    next.push(b.difference(s));
                    next.push(inside);
                }
            }
            blocks = next;
        }
        blocks.sort_by_key(|b| b.first());
        RelevantAlphabet { classes: blocks }
    }

    pub fn classes(&self) -> &[CharSet] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, c: char) -> usize {
        self.classes
            .iter()
            .position(|b| b.contains(c))
            .expect("classes partition the universe")
    }

    /// Smallest member of a class.
    pub fn representative(&self, class: usize) -> char {
        self.classes[class].first().expect("classes are nonempty")
    }

    /// Characters that form singleton classes.
    pub fn named_chars(&self) -> Vec<char> {
        self.classes.iter().filter_map(|b| b.as_single()).collect()
    }

    /// Classes whose members all lie in `set`. Every set the partition was
    /// built from is exactly the union of these.
    pub fn classes_within(&self, set: &CharSet) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].is_subset(set))
            .collect()
    }

    /// Classes that share at least one character with `set`.
    pub fn classes_meeting(&self, set: &CharSet) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].intersects(set))
            .collect()
    }

    pub fn union_of(&self, classes: impl IntoIterator<Item = usize>) -> CharSet {
        classes
            .into_iter()
            .fold(CharSet::empty(), |acc, i| acc.union(&self.classes[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse;

    fn named(r: &str, ex: &[&str]) -> (Vec<char>, usize) {
        let a = RelevantAlphabet::new(&parse(r).unwrap(), ex.iter().copied());
        (a.named_chars(), a.len())
    }

    #[test]
    fn equals_sign_example() {
        let (chars, n) = named(".*.*=.*", &["=", "abc"]);
        for c in ['=', 'a', 'b', 'c'] {
            assert!(chars.contains(&c));
        }
        assert_eq!(n, 5);
    }

    #[test]
    fn single_literal() {
        assert_eq!(named("a", &[]), (vec!['a'], 2));
    }

    #[test]
    fn negated_class() {
        let a = RelevantAlphabet::new(&parse("[^=]").unwrap(), ["="]);
        assert_eq!(a.named_chars(), vec!['=']);
        assert_eq!(a.len(), 2);
        let other = a.classes().iter().find(|b| b.as_single().is_none()).unwrap();
        assert_eq!(*other, CharSet::single('=').complement());
    }

    #[test]
    fn partition_covers_universe() {
        let a = RelevantAlphabet::new(&parse("[a-f][d-k]x|[0-9]").unwrap(), ["zz5"]);
        let all = a.union_of(0..a.len());
        assert!(all.is_full());
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                assert!(!a.classes()[i].intersects(&a.classes()[j]));
            }
        }
        for s in parse("[a-f][d-k]x|[0-9]").unwrap().charsets() {
            assert_eq!(a.union_of(a.classes_within(s)), *s);
        }
    }
}
