use super::sample::generate_random;
use crate::ast::Node;
use crate::matcher::Matcher;
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::ser::{Serialize, SerializeStruct, Serializer};

pub const DEFAULT_SAMPLES: usize = 100;

/// Precision, recall and their harmonic mean over a numeric score type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scores<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

pub type ExactScores = Scores<Ratio<u64>>;
pub type FloatScores = Scores<f64>;

impl<T: Num + Copy> Scores<T> {
    pub fn new(precision: T, recall: T) -> Scores<T> {
        let sum = precision + recall;
        let f1 = if sum.is_zero() {
            T::zero()
        } else {
            (T::one() + T::one()) * precision * recall / sum
        };
        Scores { precision, recall, f1 }
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Scores<U> {
        Scores {
            precision: f(self.precision),
            recall: f(self.recall),
            f1: f(self.f1),
        }
    }
}

impl ExactScores {
    pub fn to_f64(&self) -> FloatScores {
        self.map(|x| x.to_f64().unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityReport {
    pub scores: ExactScores,
    /// Sizes of the samples drawn from the first and second language.
    pub sample_sizes: (usize, usize),
    /// Whether the samples came from exhaustive enumeration rather than
    /// random derivations.
    pub exhaustive: bool,
}

impl Serialize for SimilarityReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let f = self.scores.to_f64();
        let mut st = s.serialize_struct("SimilarityReport", 8)?;
        st.serialize_field("precision", &f.precision)?;
        st.serialize_field("recall", &f.recall)?;
        st.serialize_field("f1", &f.f1)?;
        st.serialize_field("precision_exact", &self.scores.precision.to_string())?;
        st.serialize_field("recall_exact", &self.scores.recall.to_string())?;
        st.serialize_field("f1_exact", &self.scores.f1.to_string())?;
        st.serialize_field("sample_sizes", &[self.sample_sizes.0, self.sample_sizes.1])?;
        st.serialize_field("exhaustive", &self.exhaustive)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimilarityConfig {
    pub samples: usize,
    pub seed: u64,
    /// Cap on enumerated strings per language.
    pub budget: u64,
    /// Fall back to random derivations when enumeration exceeds the budget.
    pub guided: bool,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            budget: 1_000_000,
            guided: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimilarityError {
    #[error("enumeration of the {0} expression's language exceeded {1} strings")]
    Budget(&'static str, u64),
    #[error("the {0} expression accepts no input within the enumeration bound")]
    EmptyLanguage(&'static str),
}

const ALPHABET: std::ops::RangeInclusive<u8> = 0x20..=0x7e;

/// Accepted strings over printable ASCII of length at most one more than
/// the shortest accepted one.
fn enumerate(r: &Node, budget: u64) -> Option<Vec<String>> {
    let m = Matcher::new(r);
    let alphabet: Vec<char> = ALPHABET.map(char::from).collect();
    let mut layer = vec![String::new()];
    let mut found = Vec::new();
    let mut first_hit = None;
    let mut spent = 0u64;
    for len in 0.. {
        if let Some(n) = first_hit {
            if len > n + 1 {
                break;
            }
        }
        spent += layer.len() as u64;
        if spent > budget {
            return None;
        }
        for w in &layer {
            if m.accepts(w) == Ok(true) {
                found.push(w.clone());
                first_hit.get_or_insert(len);
            }
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&c| {
                    let mut x = w.clone();
                    x.push(c);
                    x
                })
            })
            .collect();
    }
    Some(found)
}

fn guided(r: &Node, count: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let m = Matcher::new(r);
    let mut out = indexmap::IndexSet::new();
    for _ in 0..count * 20 {
        if out.len() >= count {
            break;
        }
        if let Some(w) = generate_random(r, rng) {
            if m.accepts(&w) == Ok(true) {
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

fn language_sample(
    r: &Node,
    which: &'static str,
    cfg: &SimilarityConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<String>, bool), SimilarityError> {
    let (all, exhaustive) = match enumerate(r, cfg.budget) {
        Some(all) => (all, true),
        None if cfg.guided => (guided(r, cfg.samples, rng), false),
        None => return Err(SimilarityError::Budget(which, cfg.budget)),
    };
    if all.is_empty() {
        return Err(SimilarityError::EmptyLanguage(which));
    }
    if all.len() <= cfg.samples {
        return Ok((all, exhaustive));
    }
    let mut idx = sample(rng, all.len(), cfg.samples).into_vec();
    idx.sort_unstable();
    Ok((idx.into_iter().map(|i| all[i].clone()).collect(), exhaustive))
}

/// Precision and recall of `candidate` against `reference`, measured on
/// samples of each language; membership in the other language is exact.
pub fn similarity(
    reference: &Node,
    candidate: &Node,
    cfg: &SimilarityConfig,
) -> Result<SimilarityReport, SimilarityError> {
    let mut rng = super::rng(cfg.seed);
    let (ref_sample, e1) = language_sample(reference, "reference", cfg, &mut rng)?;
    let (cand_sample, e2) = language_sample(candidate, "candidate", cfg, &mut rng)?;
    let in_ref = Matcher::new(reference);
    let in_cand = Matcher::new(candidate);
    let hits = |m: &Matcher, ws: &[String]| ws.iter().filter(|w| m.accepts(w) == Ok(true)).count() as u64;
    let precision = Ratio::new(hits(&in_ref, &cand_sample), cand_sample.len() as u64);
    let recall = Ratio::new(hits(&in_cand, &ref_sample), ref_sample.len() as u64);
    Ok(SimilarityReport {
        scores: Scores::new(precision, recall),
        sample_sizes: (ref_sample.len(), cand_sample.len()),
        exhaustive: e1 && e2,
    })
}
