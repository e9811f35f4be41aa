//! Karp-Rabin fingerprints over the Mersenne prime `2^61 - 1`.
//!
//! A byte `c` is treated as the integer symbol `c + 1`, so every symbol is
//! non-zero and strings of different lengths do not collide trivially. For a
//! string `s` of length `m`:
//!
//! * `φ(s) = Σ code(s[i]) · b^(m-i)` (forward), and
//! * `ψ(s) = Σ code(s[i]) · b^(i-1)`, which equals `φ(rev(s))`.
//!
//! Both compose in O(1) given the lengths of the parts.

use std::collections::hash_map::Entry;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{check_range, Result};

pub const MODULUS: u64 = (1 << 61) - 1;

pub type Fingerprint = u64;

#[inline]
pub fn mul_mod(a: u64, b: u64) -> u64 {
    let prod = a as u128 * b as u128;
    let lo = (prod as u64) & MODULUS;
    let hi = (prod >> 61) as u64;
    let s = lo + hi;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow_slow(mut base: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

const CHUNK_BITS: u32 = 11;
const CHUNK: usize = 1 << CHUNK_BITS;
const CHUNKS: usize = 3;

/// `x^e` for `e < 2^33` with two multiplications: three tables of 2048 entries.
struct PowTable {
    base: u64,
    tables: Vec<[u64; CHUNK]>,
}

impl PowTable {
    fn new(base: u64) -> Self {
        let mut tables = Vec::with_capacity(CHUNKS);
        let mut step = base;
        for _ in 0..CHUNKS {
            let mut t = [0u64; CHUNK];
            t[0] = 1;
            for i in 1..CHUNK {
                t[i] = mul_mod(t[i - 1], step);
            }
            step = mul_mod(t[CHUNK - 1], step);
            tables.push(t);
        }
        Self { base, tables }
    }

    #[inline]
    fn pow(&self, e: u64) -> u64 {
        if e >> (CHUNK_BITS as usize * CHUNKS) != 0 {
            return pow_slow(self.base, e);
        }
        let mask = CHUNK as u64 - 1;
        let a = self.tables[0][(e & mask) as usize];
        let b = self.tables[1][((e >> CHUNK_BITS) & mask) as usize];
        let c = self.tables[2][((e >> (2 * CHUNK_BITS)) & mask) as usize];
        mul_mod(mul_mod(a, b), c)
    }
}

/// A randomly drawn Karp-Rabin hash function.
#[derive(Clone)]
pub struct FingerprintFn {
    seed: u64,
    base: u64,
    degenerate: bool,
    powers: Arc<PowTable>,
    inverse_powers: Arc<PowTable>,
}

impl std::fmt::Debug for FingerprintFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FingerprintFn")
            .field("seed", &self.seed)
            .field("base", &self.base)
            .field("degenerate", &self.degenerate)
            .finish()
    }
}

impl PartialEq for FingerprintFn {
    fn eq(&self, other: &Self) -> bool {
        (self.seed, self.base, self.degenerate) == (other.seed, other.base, other.degenerate)
    }
}

impl Eq for FingerprintFn {}

impl FingerprintFn {
    /// Draws the base uniformly from `[2, p-2]`; a deterministic function of `seed`.
    pub fn from_seed(seed: u64) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed).gen_range(2..=MODULUS - 2);
        Self::with_base(seed, base, false)
    }

    /// Maps every string to 0. Only useful for exercising collision handling.
    pub fn constant_zero() -> Self {
        Self::with_base(0, 0, true)
    }

    fn with_base(seed: u64, base: u64, degenerate: bool) -> Self {
        let inverse = if degenerate { 0 } else { pow_slow(base, MODULUS - 2) };
        Self {
            seed,
            base,
            degenerate,
            powers: Arc::new(PowTable::new(base)),
            inverse_powers: Arc::new(PowTable::new(inverse)),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn modulus(&self) -> u64 {
        MODULUS
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    #[inline]
    pub fn code(&self, c: u8) -> u64 {
        if self.degenerate {
            0
        } else {
            c as u64 + 1
        }
    }

    /// `base^e`.
    #[inline]
    pub fn pow(&self, e: u64) -> u64 {
        self.powers.pow(e)
    }

    /// `base^-e`.
    #[inline]
    pub fn inv_pow(&self, e: u64) -> u64 {
        self.inverse_powers.pow(e)
    }

    pub fn of(&self, s: &[u8]) -> Fingerprint {
        s.iter().fold(0, |acc, &c| add_mod(mul_mod(acc, self.base), self.code(c)))
    }

    /// `φ(rev(s))`.
    pub fn of_reversed(&self, s: &[u8]) -> Fingerprint {
        s.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, self.base), self.code(c)))
    }

    /// `φ(AB)` from `φ(A)`, `φ(B)` and `|B|`.
    #[inline]
    pub fn concat(&self, a: Fingerprint, b: Fingerprint, b_len: u64) -> Fingerprint {
        add_mod(mul_mod(a, self.pow(b_len)), b)
    }

    /// `ψ(AB)` from `ψ(A)`, `|A|` and `ψ(B)`.
    #[inline]
    pub fn concat_rev(&self, a: Fingerprint, a_len: u64, b: Fingerprint) -> Fingerprint {
        add_mod(a, mul_mod(self.pow(a_len), b))
    }

    /// `φ(c^count)` for a piece `c` of length `len`.
    pub fn repeat(&self, fp: Fingerprint, len: u64, count: u64) -> Fingerprint {
        self.repeat_with(fp, len, count, |a, _, b, bl| self.concat(a, b, bl))
    }

    /// `ψ(c^count)` for a piece `c` of length `len`.
    pub fn repeat_rev(&self, fp: Fingerprint, len: u64, count: u64) -> Fingerprint {
        self.repeat_with(fp, len, count, |a, al, b, _| self.concat_rev(a, al, b))
    }

    fn repeat_with(
        &self,
        fp: Fingerprint,
        len: u64,
        mut count: u64,
        join: impl Fn(Fingerprint, u64, Fingerprint, u64) -> Fingerprint,
    ) -> Fingerprint {
        let (mut acc, mut acc_len) = (0, 0);
        let (mut piece, mut piece_len) = (fp, len);
        while count > 0 {
            if count & 1 == 1 {
                acc = join(acc, acc_len, piece, piece_len);
                acc_len += piece_len;
            }
            count >>= 1;
            if count > 0 {
                piece = join(piece, piece_len, piece, piece_len);
                piece_len *= 2;
            }
        }
        acc
    }
}

/// Prefix fingerprints `φ(S[1,i])` of one text, giving O(1) substring fingerprints.
#[derive(Clone, Debug)]
pub struct PrefixFingerprints {
    hash: FingerprintFn,
    values: Vec<Fingerprint>,
}

impl PrefixFingerprints {
    pub fn new(text: &[u8], hash: &FingerprintFn) -> Self {
        let mut values = Vec::with_capacity(text.len() + 1);
        values.push(0);
        let mut acc = 0;
        for &c in text {
            acc = add_mod(mul_mod(acc, hash.base), hash.code(c));
            values.push(acc);
        }
        Self { hash: hash.clone(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &[Fingerprint] {
        &self.values[1..]
    }

    /// `φ(S[i, j])`, 1-based inclusive; an empty range (`j = i - 1`) gives 0.
    pub fn substring(&self, i: usize, j: usize) -> Result<Fingerprint> {
        if i == j + 1 && i >= 1 && j <= self.len() {
            return Ok(0);
        }
        check_range(i, j, self.len())?;
        Ok(self.get(i, j))
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> Fingerprint {
        if j < i {
            return 0;
        }
        sub_mod(self.values[j], mul_mod(self.values[i - 1], self.hash.pow((j - i + 1) as u64)))
    }
}

/// Checks that no two distinct strings share a fingerprint.
pub fn verify_collision_free<'a>(hash: &FingerprintFn, strings: impl IntoIterator<Item = &'a [u8]>) -> bool {
    collision_free_by(strings.into_iter().map(|s| (hash.of(s), s)), |a, b| a == b)
}

/// Collision check for items whose fingerprints are already known; `same`
/// decides whether two items denote the same string.
pub(crate) fn collision_free_by<K>(
    items: impl IntoIterator<Item = (Fingerprint, K)>,
    same: impl Fn(&K, &K) -> bool,
) -> bool {
    let mut seen: FxHashMap<Fingerprint, K> = FxHashMap::default();
    for (fp, item) in items {
        match seen.entry(fp) {
            Entry::Vacant(slot) => {
                slot.insert(item);
            }
            Entry::Occupied(slot) => {
                if !same(slot.get(), &item) {
                    return false;
                }
            }
        }
    }
    true
}
