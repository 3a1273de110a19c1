use crate::ast::{CharSet, Kind, Node};
use crate::matcher::Matcher;
use indexmap::IndexSet;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

pub const DEFAULT_EXAMPLE_COUNT: usize = 10;
/// Default cap, in seed strings, on the search for the shortest accepted input.
pub const DEFAULT_LENGTH_CAP: usize = 12;

/// Positive and negative examples, validated against the expression they
/// were drawn from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExampleSet {
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExampleError {
    #[error("`{0}` is both a positive and a negative example")]
    Overlap(String),
    #[error("positive example `{0}` is rejected by the expression")]
    PositiveRejected(String),
    #[error("negative example `{0}` is accepted by the expression")]
    NegativeAccepted(String),
    #[error("the expression accepts no sampled input; raise the length cap")]
    NoPositives,
}

impl ExampleSet {
    /// Deduplicates and checks that `r` accepts every positive and rejects
    /// every negative. Matcher budget exhaustion counts as rejection.
    pub fn new(
        r: &Node,
        positives: impl IntoIterator<Item = String>,
        negatives: impl IntoIterator<Item = String>,
    ) -> Result<ExampleSet, ExampleError> {
        let ex = ExampleSet::unchecked(positives, negatives)?;
        let m = Matcher::new(r);
        if let Some(p) = ex.positives.iter().find(|p| m.accepts(p) != Ok(true)) {
            return Err(ExampleError::PositiveRejected(p.clone()));
        }
        if let Some(n) = ex.negatives.iter().find(|n| m.accepts(n) == Ok(true)) {
            return Err(ExampleError::NegativeAccepted(n.clone()));
        }
        Ok(ex)
    }

    /// Deduplicates and checks only that the two sides are disjoint.
    pub fn unchecked(
        positives: impl IntoIterator<Item = String>,
        negatives: impl IntoIterator<Item = String>,
    ) -> Result<ExampleSet, ExampleError> {
        let pos: IndexSet<String> = positives.into_iter().collect();
        let neg: IndexSet<String> = negatives.into_iter().collect();
        if let Some(w) = pos.iter().find(|w| neg.contains(*w)) {
            return Err(ExampleError::Overlap(w.clone()));
        }
        Ok(ExampleSet {
            positives: pos.into_iter().collect(),
            negatives: neg.into_iter().collect(),
        })
    }

    pub fn all(&self) -> impl Iterator<Item = &str> {
        self.positives.iter().chain(&self.negatives).map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    /// Examples drawn per side.
    pub count: usize,
    /// Cap, in seed strings, on the shortest accepted input.
    pub length_cap: usize,
    /// Cap on enumerated seed sequences before switching to random
    /// generation.
    pub enumeration_budget: u64,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            count: DEFAULT_EXAMPLE_COUNT,
            length_cap: DEFAULT_LENGTH_CAP,
            enumeration_budget: 200_000,
            seed: 0,
        }
    }
}

const PRINTABLE: (u32, u32) = (0x20, 0x7e);

fn printable() -> CharSet {
    CharSet::from_ranges([PRINTABLE])
}

/// A random member, printable ASCII when the set has any.
pub(crate) fn pick(set: &CharSet, rng: &mut ChaCha8Rng) -> Option<char> {
    if set.is_empty() {
        return None;
    }
    let visible = set.intersect(&printable());
    let from = if visible.is_empty() { set } else { &visible };
    from.nth(rng.gen_range(0..from.len()))
}

fn flatten_concat<'a>(n: &'a Node, out: &mut Vec<&'a Node>) {
    match &n.kind {
        Kind::Concat(a, b) => {
            flatten_concat(a, out);
            flatten_concat(b, out);
        }
        _ => out.push(n),
    }
}

/// Seed strings: maximal runs of single-character sets as whole words, one
/// random member of every other set, and one character outside every set
/// (or, when the sets cover everything, outside every seed).
pub fn build_seed_strings(r: &Node, rng: &mut ChaCha8Rng) -> Vec<String> {
    fn go(n: &Node, rng: &mut ChaCha8Rng, out: &mut IndexSet<String>) {
        let mut items = Vec::new();
        flatten_concat(n, &mut items);
        let mut run = String::new();
        for item in items {
            if let Kind::Set(c) = &item.kind {
                if let Some(ch) = c.as_single() {
                    run.push(ch);
                    continue;
                }
            }
            if !run.is_empty() {
                out.insert(std::mem::take(&mut run));
            }
            match &item.kind {
                Kind::Set(c) => {
                    if let Some(ch) = pick(c, rng) {
                        out.insert(ch.to_string());
                    }
                }
                _ => {
                    for c in item.children() {
                        go(c, rng, out);
                    }
                }
            }
        }
        if !run.is_empty() {
            out.insert(run);
        }
    }
    let mut out = IndexSet::new();
    go(r, rng, &mut out);
    let covered = r.charsets().into_iter().fold(CharSet::empty(), |a, c| a.union(c));
    let used: CharSet = CharSet::from_chars(out.iter().flat_map(|s| s.chars()));
    let preferred = ('a'..='z').chain('A'..='Z').chain('0'..='9').chain((0x20u8..0x7f).map(char::from));
    let fresh = preferred
        .clone()
        .find(|&c| !covered.contains(c))
        .or_else(|| preferred.clone().find(|&c| !used.contains(c)));
    if let Some(c) = fresh {
        out.insert(c.to_string());
    }
    out.into_iter().collect()
}

fn sequences(seeds: &[String], units: usize) -> impl Iterator<Item = String> + '_ {
    let base = seeds.len();
    let total = (base as u64).saturating_pow(units as u32);
    (0..total).map(move |mut i| {
        let mut digits = vec![0usize; units];
        for d in digits.iter_mut().rev() {
            *d = (i % base as u64) as usize;
            i /= base as u64;
        }
        digits.iter().map(|&d| seeds[d].as_str()).collect()
    })
}

fn layer_size(seeds: usize, units: usize) -> u64 {
    (seeds as u64).saturating_pow(units as u32)
}

/// Least number of seed strings whose concatenation `r` accepts, searching
/// layer by layer up to `cap` units and `budget` candidates.
pub fn min_accept_length(r: &Node, seeds: &[String], cap: usize, budget: u64) -> Option<usize> {
    let m = Matcher::new(r);
    let mut spent = 0u64;
    for units in 0..=cap {
        if units > 0 && seeds.is_empty() {
            return None;
        }
        spent = spent.saturating_add(layer_size(seeds.len(), units));
        if spent > budget {
            return None;
        }
        if sequences(seeds, units).any(|w| m.accepts(&w) == Ok(true)) {
            return Some(units);
        }
    }
    None
}

fn choose(items: Vec<String>, k: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    if items.len() <= k {
        return items;
    }
    let mut idx = sample(rng, items.len(), k).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

/// Samples examples for `r`: enumerate concatenations of seed strings up to
/// one unit past the shortest accepted one, split them by the matcher, and
/// draw up to `count` from each side. When enumeration exceeds its budget,
/// candidates come from random derivations of `r` and their mutations.
pub fn sample_examples(r: &Node, cfg: &SampleConfig) -> Result<ExampleSet, ExampleError> {
    let mut rng = super::rng(cfg.seed);
    let seeds = build_seed_strings(r, &mut rng);
    let m = Matcher::new(r);
    let enumerated = min_accept_length(r, &seeds, cfg.length_cap, cfg.enumeration_budget)
        .map(|n| (0..=n + 1).map(|u| layer_size(seeds.len(), u)).fold(0u64, u64::saturating_add))
        .filter(|&total| total <= cfg.enumeration_budget)
        .is_some();
    let candidates: IndexSet<String> = if enumerated {
        let n = min_accept_length(r, &seeds, cfg.length_cap, cfg.enumeration_budget).unwrap();
        (0..=n + 1).flat_map(|u| sequences(&seeds, u)).collect()
    } else {
        random_candidates(r, &seeds, cfg.count, &mut rng)
    };
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for w in candidates {
        match m.accepts(&w) {
            Ok(true) => pos.push(w),
            Ok(false) => neg.push(w),
            Err(_) => {}
        }
    }
    if pos.is_empty() {
        return Err(ExampleError::NoPositives);
    }
    let pos = choose(pos, cfg.count, &mut rng);
    let neg = choose(neg, cfg.count, &mut rng);
    ExampleSet::unchecked(pos, neg)
}

const RANDOM_ATTEMPTS: usize = 400;

fn random_candidates(r: &Node, seeds: &[String], k: usize, rng: &mut ChaCha8Rng) -> IndexSet<String> {
    let m = Matcher::new(r);
    let mut out: IndexSet<String> = seeds.iter().cloned().collect();
    out.insert(String::new());
    let mut accepted = Vec::new();
    for _ in 0..RANDOM_ATTEMPTS {
        if accepted.len() >= 4 * k {
            break;
        }
        if let Some(w) = generate_random(r, rng) {
            if !out.contains(&w) && m.accepts(&w) == Ok(true) {
                accepted.push(w.clone());
            }
            out.insert(w);
        }
    }
    let alphabet: Vec<char> = seeds.iter().flat_map(|s| s.chars()).collect();
    for w in accepted {
        for _ in 0..3 {
            out.insert(mutate(&w, &alphabet, rng));
        }
    }
    out
}

fn mutate(w: &str, alphabet: &[char], rng: &mut ChaCha8Rng) -> String {
    let mut cs: Vec<char> = w.chars().collect();
    let fill = |rng: &mut ChaCha8Rng| {
        if alphabet.is_empty() {
            'a'
        } else {
            alphabet[rng.gen_range(0..alphabet.len())]
        }
    };
    match rng.gen_range(0..3) {
        0 if !cs.is_empty() => {
            cs.remove(rng.gen_range(0..cs.len()));
        }
        1 if !cs.is_empty() => {
            let i = rng.gen_range(0..cs.len());
            cs[i] = fill(rng);
        }
        _ => {
            let i = rng.gen_range(0..=cs.len());
            let c = fill(rng);
            cs.insert(i, c);
        }
    }
    cs.into_iter().collect()
}

/// A random derivation of `r` ignoring lookarounds; `None` when it reads an
/// empty set or an unset capture. The result still needs a membership check.
pub fn generate_random(r: &Node, rng: &mut ChaCha8Rng) -> Option<String> {
    fn go(n: &Node, rng: &mut ChaCha8Rng, caps: &mut HashMap<u32, String>, out: &mut String, depth: u32) -> Option<()> {
        match &n.kind {
            Kind::Set(c) => out.push(pick(c, rng)?),
            Kind::Epsilon | Kind::Look(..) => {}
            Kind::Hole(_) => return None,
            Kind::Concat(a, b) => {
                go(a, rng, caps, out, depth)?;
                go(b, rng, caps, out, depth)?;
            }
            Kind::Union(a, b) => {
                let side = if rng.gen_bool(0.5) { a } else { b };
                go(side, rng, caps, out, depth)?;
            }
            Kind::Star(a) => {
                if depth < 6 {
                    while rng.gen_bool(0.6) && out.len() < 256 {
                        go(a, rng, caps, out, depth + 1)?;
                    }
                }
            }
            Kind::Capture(i, a) => {
                let start = out.len();
                go(a, rng, caps, out, depth)?;
                caps.insert(*i, out[start..].to_string());
            }
            Kind::Backref(i) => out.push_str(caps.get(i)?),
        }
        Some(())
    }
    let mut out = String::new();
    go(r, rng, &mut HashMap::new(), &mut out, 0)?;
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse;
    use crate::examples::rng;

    #[test]
    fn seeds_keep_literal_words() {
        let r = parse("Content-Security-Policy|[z]").unwrap();
        let s = build_seed_strings(&r, &mut rng(1));
        assert_eq!(s.len(), 3);
        assert_eq!(&s[..2], ["Content-Security-Policy", "z"]);
        assert!(!s[2].is_empty() && !r.charsets().iter().any(|c| c.contains(s[2].chars().next().unwrap())));
    }

    #[test]
    fn seeds_for_classes() {
        let r = parse("[0-9][A-Z]").unwrap();
        let s = build_seed_strings(&r, &mut rng(7));
        assert_eq!(s.len(), 3);
        assert!(s[0].chars().all(|c| c.is_ascii_digit()));
        assert!(s[1].chars().all(|c| c.is_ascii_uppercase()));
        assert_eq!(s, build_seed_strings(&r, &mut rng(7)));
    }

    #[test]
    fn minimum_lengths() {
        let seeds = |r: &Node| build_seed_strings(r, &mut rng(0));
        let eps = Node::eps();
        assert_eq!(min_accept_length(&eps, &seeds(&eps), 12, 1000), Some(0));
        let r = parse(r"(a*)\1").unwrap();
        assert_eq!(min_accept_length(&r, &["a".into()], 12, 1000), Some(0));
        let r = parse(".*.*=.*").unwrap();
        assert_eq!(min_accept_length(&r, &seeds(&r), 12, 100_000), Some(1));
        let r = Node::nothing();
        assert_eq!(min_accept_length(&r, &seeds(&r), 3, 1000), None);
    }

    #[test]
    fn sampling_classifies() {
        let r = parse(".*.*=.*").unwrap();
        let ex = sample_examples(&r, &SampleConfig { seed: 3, ..Default::default() }).unwrap();
        assert!(ex.positives.contains(&"=".to_string()) || ex.positives.len() == DEFAULT_EXAMPLE_COUNT);
        assert!(ex.positives.iter().all(|p| p.contains('=')));
        assert!(ex.negatives.iter().all(|n| !n.contains('=')));
        assert!(ExampleSet::new(&r, ex.positives.clone(), ex.negatives.clone()).is_ok());
    }

    #[test]
    fn small_languages_are_taken_whole() {
        let r = parse("a|b").unwrap();
        let ex = sample_examples(&r, &SampleConfig::default()).unwrap();
        assert_eq!(ex.positives, ["a", "b"]);
    }

    #[test]
    fn empty_language_is_reported() {
        assert_eq!(
            sample_examples(&Node::nothing(), &SampleConfig::default()),
            Err(ExampleError::NoPositives)
        );
    }

    #[test]
    fn example_set_validation() {
        let r = parse("a").unwrap();
        assert!(matches!(ExampleSet::new(&r, ["a".into()], ["a".into()]), Err(ExampleError::Overlap(_))));
        assert!(matches!(ExampleSet::new(&r, ["b".into()], []), Err(ExampleError::PositiveRejected(_))));
        assert!(matches!(ExampleSet::new(&r, [], ["a".into()]), Err(ExampleError::NegativeAccepted(_))));
    }

    #[test]
    fn random_fallback_finds_positives() {
        let r = parse("[a-z]{6}@[a-z]{6}\\.com").unwrap();
        let cfg = SampleConfig { enumeration_budget: 10, seed: 5, ..Default::default() };
        let ex = sample_examples(&r, &cfg).unwrap();
        assert!(!ex.positives.is_empty() && !ex.negatives.is_empty());
        assert!(ExampleSet::new(&r, ex.positives, ex.negatives).is_ok());
    }
}
