//! Example sampling, language similarity, and character-class widening.

mod sample;
mod similarity;
mod widen;

pub use sample::{
    build_seed_strings, generate_random, min_accept_length, sample_examples, ExampleError,
    ExampleSet, SampleConfig, DEFAULT_EXAMPLE_COUNT, DEFAULT_LENGTH_CAP,
};
pub use similarity::{
    similarity, ExactScores, FloatScores, Scores, SimilarityConfig, SimilarityError,
    SimilarityReport, DEFAULT_SAMPLES,
};
pub use widen::widen_char_sets;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every randomized operation.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
