//! Seeded text generators used by tests, benchmarks and the CLI.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform symbols from the first `sigma` lowercase letters.
pub fn random(n: usize, sigma: u8, seed: u64) -> Vec<u8> {
    assert!((1..=26).contains(&sigma));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was", "with", "be", "by", "on", "not",
    "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an", "had", "they", "you", "were",
    "their", "one", "all", "we", "can", "her", "has", "there", "been", "if", "more", "when", "will", "would",
    "who", "so", "no", "river", "stone", "market", "winter", "letter", "garden", "engine", "harbour", "silver",
    "account", "question", "morning", "history", "country", "problem", "station", "evening", "children",
];

/// Words drawn with Zipf-like frequencies, separated by spaces, with
/// occasional sentence breaks.
pub fn english_like(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (1..=WORDS.len()).map(|r| 1.0 / r as f64).collect();
    let pick = WeightedIndex::new(&weights).unwrap();
    let mut out = Vec::with_capacity(n + 16);
    while out.len() < n {
        out.extend_from_slice(WORDS[pick.sample(&mut rng)].as_bytes());
        out.push(if rng.gen_bool(0.08) { b'.' } else { b' ' });
    }
    out.truncate(n);
    out
}

/// Prefix of length `n` of the Fibonacci word over `{a, b}`.
pub fn fibonacci(n: usize) -> Vec<u8> {
    let (mut a, mut b) = (b"a".to_vec(), b"ab".to_vec());
    while b.len() < n {
        let next = [b.as_slice(), a.as_slice()].concat();
        a = b;
        b = next;
    }
    b.truncate(n);
    b
}

/// `k` concatenated copies of `base`, each copy after the first receiving
/// `mutations` random substitutions.
pub fn copies_of(base: &[u8], k: usize, mutations: usize, sigma: u8, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(base.len() * k);
    out.extend_from_slice(base);
    for _ in 1..k {
        let at = out.len();
        out.extend_from_slice(base);
        for _ in 0..mutations {
            let i = at + rng.gen_range(0..base.len());
            out[i] = b'a' + rng.gen_range(0..sigma);
        }
    }
    out
}

/// Copies of a random base of length `base_len` until `n` symbols.
pub fn k_copies(n: usize, base_len: usize, mutations: usize, seed: u64) -> Vec<u8> {
    let base = random(base_len, 4, seed);
    let mut out = copies_of(&base, n.div_ceil(base_len), mutations, 4, seed ^ 1);
    out.truncate(n);
    out
}

/// Maximal runs of random symbols with lengths in `1..=max_run`.
pub fn all_runs(n: usize, max_run: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut last = 0u8;
    while out.len() < n {
        let mut c = b'a' + rng.gen_range(0..3);
        if c == last {
            c = if c == b'c' { b'a' } else { c + 1 };
        }
        last = c;
        let len = rng.gen_range(1..=max_run).min(n - out.len());
        out.extend(std::iter::repeat_n(c, len));
    }
    out
}

/// A named text in the standard test matrix.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub name: String,
    pub text: Vec<u8>,
}

impl Corpus {
    fn new(name: &str, text: Vec<u8>) -> Self {
        Self { name: name.to_string(), text }
    }
}

/// Eleven corpora of about `n` symbols covering the text families of interest.
pub fn standard_matrix(n: usize, seed: u64) -> Vec<Corpus> {
    vec![
        Corpus::new("random-dna", random(n, 4, seed)),
        Corpus::new("random-26", random(n, 26, seed + 1)),
        Corpus::new("english", english_like(n, seed + 2)),
        Corpus::new("fibonacci", fibonacci(n)),
        Corpus::new("copies-exact", k_copies(n, (n / 16).max(1), 0, seed + 3)),
        Corpus::new("copies-mutated", k_copies(n, (n / 20).max(1), 4, seed + 4)),
        Corpus::new("copies-english", {
            let base = english_like((n / 8).max(1), seed + 5);
            let mut t = copies_of(&base, 8, 6, 26, seed + 6);
            t.truncate(n);
            t
        }),
        Corpus::new("all-runs", all_runs(n, 12, seed + 7)),
        Corpus::new("binary", random(n, 2, seed + 8)),
        Corpus::new("unary", vec![b'a'; n]),
        Corpus::new("binary-copies", {
            let base = random((n / 10).max(1), 2, seed + 9);
            let mut t = copies_of(&base, 10, 2, 2, seed + 10);
            t.truncate(n);
            t
        }),
    ]
}
