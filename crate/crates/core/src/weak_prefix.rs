//! Weak prefix search over a sorted, deduplicated set of keys.
//!
//! Keys are descriptors resolved through a [`KeyText`], so the key strings
//! never have to be stored. The search is a binary search whose comparisons
//! find the longest common prefix with fingerprints and then compare one
//! symbol. When the needle prefixes at least one key and the fingerprints
//! do not collide, the returned rank range is exactly the set of keys with
//! that prefix; otherwise it may be anything, and callers verify.
//! [`WeakPrefixSet::query_exact`] does the same search by extraction.

use std::cmp::Ordering;
use std::ops::Range;

use crate::fingerprint::{Fingerprint, PrefixFingerprints};

/// Resolves key descriptors to strings.
pub trait KeyText {
    type Key;

    fn key_len(&self, key: &Self::Key) -> usize;

    /// `φ` of the first `l` symbols of the key.
    fn key_prefix_fp(&self, key: &Self::Key, l: usize) -> Fingerprint;

    /// Appends symbols `[from, to)` of the key to `out`.
    fn key_symbols(&self, key: &Self::Key, from: usize, to: usize, out: &mut Vec<u8>);
}

/// A query string: a window of a materialized text with its prefix fingerprints.
#[derive(Clone, Copy)]
pub struct Needle<'a> {
    text: &'a [u8],
    prefix: &'a PrefixFingerprints,
    start: usize,
}

impl<'a> Needle<'a> {
    /// The window `text[start..]`; `prefix` must be the prefix fingerprints of `text`.
    pub fn new(text: &'a [u8], prefix: &'a PrefixFingerprints, start: usize) -> Self {
        assert_eq!(text.len(), prefix.len());
        Self { text, prefix, start }
    }

    /// The window `text[start..end]`.
    pub fn window(text: &'a [u8], prefix: &'a PrefixFingerprints, range: Range<usize>) -> (Self, usize) {
        (Self::new(text, prefix, range.start), range.len())
    }

    pub fn bytes(&self, len: usize) -> &'a [u8] {
        &self.text[self.start..self.start + len]
    }

    #[inline]
    pub fn prefix_fp(&self, l: usize) -> Fingerprint {
        self.prefix.get(self.start + 1, self.start + l)
    }
}

/// Keys in strictly increasing lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakPrefixSet<K> {
    keys: Vec<K>,
}

impl<K> WeakPrefixSet<K> {
    /// Sorts `keys` with `cmp` and drops duplicates. Returns the set and,
    /// for every input key, the rank of its retained representative.
    pub fn build(keys: Vec<K>, mut cmp: impl FnMut(&K, &K) -> Ordering) -> (Self, Vec<usize>) {
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| cmp(&keys[a], &keys[b]));
        let mut rank_of = vec![0; keys.len()];
        let mut keep = vec![false; keys.len()];
        let mut rank = 0;
        for (i, &k) in order.iter().enumerate() {
            if i > 0 && cmp(&keys[order[i - 1]], &keys[k]) != Ordering::Equal {
                rank += 1;
            }
            if i == 0 || cmp(&keys[order[i - 1]], &keys[k]) != Ordering::Equal {
                keep[k] = true;
            }
            rank_of[k] = rank;
        }
        let mut slots: Vec<Option<K>> = keys.into_iter().map(Some).collect();
        let sorted = order.iter().filter(|&&k| keep[k]).map(|&k| slots[k].take().unwrap()).collect();
        (Self { keys: sorted }, rank_of)
    }

    /// Wraps keys that are already strictly sorted.
    pub fn from_sorted(keys: Vec<K>) -> Self {
        Self { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn key(&self, rank: usize) -> &K {
        &self.keys[rank]
    }

    /// Fingerprint-guided search for the ranks of keys prefixed by the first
    /// `len` symbols of `needle`. `None` means no key matched.
    pub fn query<T: KeyText<Key = K>>(&self, text: &T, needle: Needle<'_>, len: usize) -> Option<Range<usize>> {
        let cmp = |k: &K, known: usize| compare_fp(text, k, needle, len, known);
        let lo = self.search(&cmp, false);
        let hi = self.search(&cmp, true);
        (lo < hi).then_some(lo..hi)
    }

    /// As [`query`](Self::query) but comparing extracted symbols, so the
    /// answer is exact whatever the fingerprint function.
    pub fn query_exact<T: KeyText<Key = K>>(
        &self,
        text: &T,
        needle: Needle<'_>,
        len: usize,
    ) -> Option<Range<usize>> {
        let cmp = |k: &K, known: usize| compare_exact(text, k, needle.bytes(len), known);
        let lo = self.search(&cmp, false);
        let hi = self.search(&cmp, true);
        (lo < hi).then_some(lo..hi)
    }

    /// First rank whose key compares `>=` (or `>` when `upper`) to the needle,
    /// comparing keys truncated to the needle length.
    fn search(&self, cmp: &impl Fn(&K, usize) -> (Ordering, usize), upper: bool) -> usize {
        let (mut lo, mut hi) = (0, self.keys.len());
        // Common prefix of the needle with the keys just outside [lo, hi);
        // every key in between shares the shorter of the two.
        let (mut lcp_lo, mut lcp_hi) = (0, 0);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let (ord, l) = cmp(&self.keys[mid], lcp_lo.min(lcp_hi));
            let right = if upper { ord != Ordering::Greater } else { ord == Ordering::Less };
            if right {
                lo = mid + 1;
                lcp_lo = l;
            } else {
                hi = mid;
                lcp_hi = l;
            }
        }
        lo
    }
}

/// Compares the key, truncated to `len`, with the needle. Returns the order
/// and the common prefix length, given that the first `known` symbols match.
fn compare_fp<T: KeyText>(text: &T, key: &T::Key, needle: Needle<'_>, len: usize, known: usize) -> (Ordering, usize) {
    let cap = len.min(text.key_len(key));
    let equal = |l: usize| text.key_prefix_fp(key, l) == needle.prefix_fp(l);
    let known = known.min(cap);
    // Gallop from `known`, then bisect between the last match and first mismatch.
    let (mut good, mut bad) = (known, cap + 1);
    let mut step = 1;
    while good < cap {
        let probe = (good + step).min(cap);
        if equal(probe) {
            good = probe;
            step *= 2;
        } else {
            bad = probe;
            break;
        }
    }
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if equal(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    finish(text, key, needle.bytes(len), good)
}

fn compare_exact<T: KeyText>(text: &T, key: &T::Key, needle: &[u8], known: usize) -> (Ordering, usize) {
    let cap = needle.len().min(text.key_len(key));
    let mut l = known.min(cap);
    let mut buf = Vec::new();
    let mut chunk = 32;
    while l < cap {
        let to = (l + chunk).min(cap);
        buf.clear();
        text.key_symbols(key, l, to, &mut buf);
        match buf.iter().zip(&needle[l..to]).position(|(a, b)| a != b) {
            Some(k) => {
                l += k;
                break;
            }
            None => l = to,
        }
        chunk *= 2;
    }
    finish(text, key, needle, l)
}

fn finish<T: KeyText>(text: &T, key: &T::Key, needle: &[u8], lcp: usize) -> (Ordering, usize) {
    if lcp >= needle.len() {
        return (Ordering::Equal, lcp);
    }
    if lcp >= text.key_len(key) {
        return (Ordering::Less, lcp);
    }
    let mut buf = Vec::with_capacity(1);
    text.key_symbols(key, lcp, lcp + 1, &mut buf);
    (buf[0].cmp(&needle[lcp]), lcp)
}
