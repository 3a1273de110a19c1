use std::fmt;

const MAX: u32 = 0x10FFFF;
const SURROGATE_LO: u32 = 0xD800;
const SURROGATE_HI: u32 = 0xDFFF;

/// A set of Unicode scalar values stored as sorted, disjoint, non-adjacent
/// inclusive ranges. Adjacency skips the surrogate gap, so every set has a
/// single canonical representation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CharSet {
    ranges: Vec<(u32, u32)>,
}

fn succ(c: u32) -> u32 {
    if c + 1 == SURROGATE_LO {
        SURROGATE_HI + 1
    } else {
        c + 1
    }
}

fn pred(c: u32) -> u32 {
    if c == SURROGATE_HI + 1 {
        SURROGATE_LO - 1
    } else {
        c - 1
    }
}

impl CharSet {
    pub fn empty() -> CharSet {
        CharSet { ranges: Vec::new() }
    }

    pub fn full() -> CharSet {
        CharSet::from_ranges([(0, MAX)])
    }

    pub fn single(c: char) -> CharSet {
        CharSet {
            ranges: vec![(c as u32, c as u32)],
        }
    }

    pub fn range(lo: char, hi: char) -> CharSet {
        CharSet::from_ranges([(lo as u32, hi as u32)])
    }

    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> CharSet {
        CharSet::from_ranges(chars.into_iter().map(|c| (c as u32, c as u32)))
    }

    /// Normalizes arbitrary (possibly overlapping, unordered) ranges.
    pub fn from_ranges(ranges: impl IntoIterator<Item = (u32, u32)>) -> CharSet {
        let mut rs: Vec<(u32, u32)> = Vec::new();
        for (lo, hi) in ranges {
            let hi = hi.min(MAX);
            if lo > hi {
                continue;
            }
            // Split around the surrogate block.
            if lo < SURROGATE_LO {
                rs.push((lo, hi.min(SURROGATE_LO - 1)));
            }
            if hi > SURROGATE_HI {
                rs.push((lo.max(SURROGATE_HI + 1), hi));
            }
        }
        rs.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(rs.len());
        for (lo, hi) in rs {
            if let Some(last) = out.last_mut() {
                if lo <= succ(last.1) {
                    last.1 = last.1.max(hi);
                    continue;
                }
            }
            out.push((lo, hi));
        }
        CharSet { ranges: out }
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    /// Ranges as `char` pairs.
    pub fn char_ranges(&self) -> impl Iterator<Item = (char, char)> + '_ {
        self.ranges.iter().map(|&(lo, hi)| {
            (
                char::from_u32(lo).expect("scalar value"),
                char::from_u32(hi).expect("scalar value"),
            )
        })
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == CharSet::full()
    }

    pub fn contains(&self, c: char) -> bool {
        let c = c as u32;
        match self.ranges.binary_search_by(|&(lo, _)| lo.cmp(&c)) {
            Ok(_) => true,
            Err(0) => false,
            Err(i) => self.ranges[i - 1].1 >= c,
        }
    }

    /// Number of scalar values in the set.
    pub fn len(&self) -> u64 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| {
                let raw = (hi - lo + 1) as u64;
                if lo < SURROGATE_LO && hi > SURROGATE_HI {
                    raw - (SURROGATE_HI - SURROGATE_LO + 1) as u64
                } else {
                    raw
                }
            })
            .sum()
    }

    pub fn as_single(&self) -> Option<char> {
        match self.ranges.as_slice() {
            [(lo, hi)] if lo == hi => char::from_u32(*lo),
            _ => None,
        }
    }

    /// Smallest member.
    pub fn first(&self) -> Option<char> {
        self.ranges.first().and_then(|&(lo, _)| char::from_u32(lo))
    }

    pub fn union(&self, other: &CharSet) -> CharSet {
        CharSet::from_ranges(self.ranges.iter().chain(&other.ranges).copied())
    }

    pub fn complement(&self) -> CharSet {
        let mut out = Vec::new();
        let mut next = 0u32;
        for &(lo, hi) in &self.ranges {
            if lo > next {
                out.push((next, pred(lo)));
            }
            next = if hi == MAX { MAX + 1 } else { succ(hi) };
        }
        if next <= MAX {
            out.push((next, MAX));
        }
        CharSet::from_ranges(out)
    }

    pub fn intersect(&self, other: &CharSet) -> CharSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ranges.len() && j < other.ranges.len() {
            let (a, b) = self.ranges[i];
            let (c, d) = other.ranges[j];
            let lo = a.max(c);
            let hi = b.min(d);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        CharSet::from_ranges(out)
    }

    pub fn difference(&self, other: &CharSet) -> CharSet {
        self.intersect(&other.complement())
    }

    pub fn intersects(&self, other: &CharSet) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn is_subset(&self, other: &CharSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Members, in order. Only sensible for small sets.
    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.ranges
            .iter()
            .flat_map(|&(lo, hi)| (lo..=hi).filter_map(char::from_u32))
    }

    /// The `n`-th member in ascending order, if any.
    pub fn nth(&self, mut n: u64) -> Option<char> {
        for &(lo, hi) in &self.ranges {
            let pieces = if lo < SURROGATE_LO && hi > SURROGATE_HI {
                [(lo, SURROGATE_LO - 1), (SURROGATE_HI + 1, hi)]
            } else {
                [(lo, hi), (1, 0)]
            };
            for (a, b) in pieces {
                if a > b {
                    continue;
                }
                let span = (b - a + 1) as u64;
                if n < span {
                    return char::from_u32(a + n as u32);
                }
                n -= span;
            }
        }
        None
    }
}

impl fmt::Debug for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::ast::print::charset_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_set() -> impl Strategy<Value = CharSet> {
        prop::collection::vec((0u32..300, 0u32..20), 0..6)
            .prop_map(|v| CharSet::from_ranges(v.into_iter().map(|(lo, w)| (lo, lo + w))))
    }

    proptest! {
        #[test]
        fn canonical_ranges(s in arb_set()) {
            for w in s.ranges().windows(2) {
                prop_assert!(succ(w[0].1) < w[1].0);
            }
        }

        #[test]
        fn membership_matches_ops(a in arb_set(), b in arb_set(), c in 0u32..330) {
            let ch = char::from_u32(c).unwrap();
            prop_assert_eq!(a.union(&b).contains(ch), a.contains(ch) || b.contains(ch));
            prop_assert_eq!(a.intersect(&b).contains(ch), a.contains(ch) && b.contains(ch));
            prop_assert_eq!(a.complement().contains(ch), !a.contains(ch));
            prop_assert_eq!(a.difference(&b).contains(ch), a.contains(ch) && !b.contains(ch));
        }

        #[test]
        fn semantic_equality_is_structural(a in arb_set(), b in arb_set()) {
            let left = a.union(&b);
            let right = CharSet::from_chars(a.chars().chain(b.chars()));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn double_complement(a in arb_set()) {
            prop_assert_eq!(a.complement().complement(), a);
        }
    }

    #[test]
    fn surrogates_excluded() {
        let full = CharSet::full();
        assert_eq!(full.ranges().len(), 1);
        assert_eq!(full.len(), 0x110000 - 0x800);
        assert!(CharSet::single('a').complement().contains('\u{E000}'));
        assert_eq!(CharSet::empty().complement(), full);
    }
}
