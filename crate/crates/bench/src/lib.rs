//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigx::corpus;

pub const SEED: u64 = 0xBE7C_0001;

/// A highly repetitive text: mutated copies of one 4 KiB base.
pub fn repetitive(n: usize) -> Vec<u8> {
    corpus::k_copies(n, 4096, 4, SEED)
}

/// `count` substrings of `text` of length `m`, drawn uniformly.
pub fn sample_patterns(text: &[u8], m: usize, count: usize) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ m as u64);
    (0..count)
        .map(|_| {
            let i = rng.gen_range(0..=text.len() - m);
            text[i..i + m].to_vec()
        })
        .collect()
}
