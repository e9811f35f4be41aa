//! Primary occurrences of patterns up to a length cap `L` via the strings
//! that cross a border.
//!
//! `B` is the set of substrings of length at most `L` containing a border.
//! A dictionary maps each string of `B`, by fingerprint, to its *split
//! offsets*: the 1-based offsets of the leftmost border over its
//! occurrences. For a split `s`, `P[1, s-1]` must end right before some
//! border `b` without containing one, and `P[s, m]` must start at `b`; two
//! weak prefix searches over border-anchored keys and a range query find all
//! such borders.

use rustc_hash::FxHashMap;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::fingerprint::{collision_free_by, Fingerprint, FingerprintFn, PrefixFingerprints};
use crate::grammar::SignatureDag;
use crate::lz77::Lz77Parse;
use crate::range_report::RangePointSet;
use crate::weak_prefix::{KeyText, Needle, WeakPrefixSet};

/// A key anchored at a border: the `len` symbols before it (reversed) for
/// the left set, or the `len` symbols from it for the right set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BorderKey {
    /// 1-based border position.
    pub border: u64,
    pub len: u32,
}

struct LeftKeys<'a>(&'a SignatureDag);
struct RightKeys<'a>(&'a SignatureDag);

impl KeyText for LeftKeys<'_> {
    type Key = BorderKey;

    fn key_len(&self, key: &BorderKey) -> usize {
        key.len as usize
    }

    fn key_prefix_fp(&self, key: &BorderKey, l: usize) -> Fingerprint {
        let end = key.border - 1;
        self.0.range_rfp_raw(self.0.root(), end - l as u64, end)
    }

    fn key_symbols(&self, key: &BorderKey, from: usize, to: usize, out: &mut Vec<u8>) {
        let end = key.border - 1;
        let at = out.len();
        self.0.extract_raw(self.0.root(), end - to as u64, end - from as u64, out);
        out[at..].reverse();
    }
}

impl KeyText for RightKeys<'_> {
    type Key = BorderKey;

    fn key_len(&self, key: &BorderKey) -> usize {
        key.len as usize
    }

    fn key_prefix_fp(&self, key: &BorderKey, l: usize) -> Fingerprint {
        let start = key.border - 1;
        self.0.range_fp_raw(self.0.root(), start, start + l as u64)
    }

    fn key_symbols(&self, key: &BorderKey, from: usize, to: usize, out: &mut Vec<u8>) {
        let start = key.border - 1;
        self.0.extract_raw(self.0.root(), start + from as u64, start + to as u64, out);
    }
}

/// Calls `visit(start, len, split)` for every window of `B`: 1-based start,
/// length, and the 1-based offset of its leftmost border.
pub fn for_each_border_window(parse: &Lz77Parse, cap: usize, mut visit: impl FnMut(usize, usize, usize)) {
    let n = parse.n();
    let mut bi = 0;
    for (ph, &u) in parse.phrases().iter().zip(parse.phrase_starts()) {
        if ph.literal.is_none() {
            continue;
        }
        let b = parse.borders()[bi];
        bi += 1;
        // Windows starting at or after u contain no earlier border.
        let first = u.max((b + 1).saturating_sub(cap)).max(1);
        for p in first..=b {
            let split = b - p + 1;
            for len in split..=cap.min(n - p + 1) {
                visit(p, len, split);
            }
        }
    }
}

/// Work done by one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SemiStats {
    pub dictionary_hits: usize,
    pub prefix_searches: usize,
    /// Extractions performed to confirm a dictionary hit.
    pub verifications: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiShortIndex {
    cap: usize,
    splits: FxHashMap<Fingerprint, Vec<u32>>,
    left: WeakPrefixSet<BorderKey>,
    right: WeakPrefixSet<BorderKey>,
    points: RangePointSet<u64>,
    windows: usize,
}

impl SemiShortIndex {
    pub fn build(text: &[u8], parse: &Lz77Parse, cap: usize, hash: &FingerprintFn) -> Self {
        assert!(cap >= 1, "length cap must be positive");
        let prefix = PrefixFingerprints::new(text, hash);
        let mut splits: FxHashMap<Fingerprint, Vec<u32>> = FxHashMap::default();
        let mut windows = 0;
        for_each_border_window(parse, cap, |p, len, s| {
            windows += 1;
            splits.entry(prefix.get(p, p + len - 1)).or_default().push(s as u32);
        });
        for v in splits.values_mut() {
            v.sort_unstable();
            v.dedup();
            v.shrink_to_fit();
        }

        let n = text.len();
        let mut lefts = Vec::new();
        let mut rights = Vec::new();
        let mut bi = 0;
        for (ph, &u) in parse.phrases().iter().zip(parse.phrase_starts()) {
            if ph.literal.is_none() {
                continue;
            }
            let b = parse.borders()[bi];
            bi += 1;
            let from = u.max(b.saturating_sub(cap)).max(1);
            lefts.push(BorderKey { border: b as u64, len: (b - from) as u32 });
            rights.push(BorderKey { border: b as u64, len: (cap.min(n - b + 1)) as u32 });
        }
        let left_str = |k: &BorderKey| text[k.border as usize - 1 - k.len as usize..k.border as usize - 1].iter().rev();
        let right_str = |k: &BorderKey| &text[k.border as usize - 1..k.border as usize - 1 + k.len as usize];
        let (left, x) = WeakPrefixSet::build(lefts.clone(), |a, b| left_str(a).cmp(left_str(b)));
        let (right, y) = WeakPrefixSet::build(rights.clone(), |a, b| right_str(a).cmp(right_str(b)));
        let points =
            lefts.iter().enumerate().map(|(i, k)| (x[i] as u64, y[i] as u64, k.border)).collect();
        Self { cap, splits, left, right, points: RangePointSet::build(points), windows }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Windows enumerated at build (`|B|` counted with multiplicity).
    pub fn num_windows(&self) -> usize {
        self.windows
    }

    /// Distinct fingerprints in the split dictionary.
    pub fn num_strings(&self) -> usize {
        self.splits.len()
    }

    pub fn num_borders(&self) -> usize {
        self.points.len()
    }

    /// Whether `hash` gives distinct strings of `B` distinct fingerprints.
    pub fn collision_free(text: &[u8], parse: &Lz77Parse, cap: usize, hash: &FingerprintFn) -> bool {
        let prefix = PrefixFingerprints::new(text, hash);
        let mut items = Vec::new();
        for_each_border_window(parse, cap, |p, len, _| items.push((prefix.get(p, p + len - 1), (p, len))));
        collision_free_by(items, |&(p, l), &(q, k)| text[p - 1..p - 1 + l] == text[q - 1..q - 1 + k])
    }

    /// Sorted primary occurrences of `pattern` (`1 ≤ m ≤ cap`).
    pub fn query(&self, dag: &SignatureDag, pattern: &[u8], trusted: bool, stats: &mut SemiStats) -> Result<Vec<usize>> {
        let m = pattern.len();
        if m == 0 || m > self.cap {
            return Err(Error::PatternLength { len: m, min: 1, max: self.cap });
        }
        let fp = dag.fingerprint_fn().of(pattern);
        let Some(splits) = self.splits.get(&fp) else { return Ok(Vec::new()) };
        stats.dictionary_hits += 1;
        let splits: Vec<usize> = splits.iter().map(|&s| s as usize).filter(|&s| s <= m).collect();
        self.query_splits(dag, pattern, &splits, trusted, stats)
    }

    /// The search behind [`query`](Self::query) for an explicit list of
    /// split offsets. Reports nothing unless the first candidate survives an
    /// extraction check.
    pub fn query_splits(
        &self,
        dag: &SignatureDag,
        pattern: &[u8],
        splits: &[usize],
        trusted: bool,
        stats: &mut SemiStats,
    ) -> Result<Vec<usize>> {
        let m = pattern.len();
        let hash = dag.fingerprint_fn();
        let reversed: Vec<u8> = pattern.iter().rev().copied().collect();
        let fwd = PrefixFingerprints::new(pattern, hash);
        let rev = PrefixFingerprints::new(&reversed, hash);
        let (lk, rk) = (LeftKeys(dag), RightKeys(dag));
        let mut out = Vec::new();
        let mut confirmed = false;
        for &s in splits {
            if s == 0 || s > m {
                continue;
            }
            let left_len = s - 1;
            let xr = if left_len == 0 {
                (!self.left.is_empty()).then(|| 0..self.left.len())
            } else {
                stats.prefix_searches += 1;
                search(&self.left, &lk, Needle::new(&reversed, &rev, m - left_len), left_len, trusted)
            };
            let Some(xr) = xr else { continue };
            stats.prefix_searches += 1;
            let Some(yr) = search(&self.right, &rk, Needle::new(pattern, &fwd, left_len), m - left_len, trusted)
            else {
                continue;
            };
            let mut borders = Vec::new();
            self.points.report_into(
                xr.start as u64,
                xr.end as u64 - 1,
                yr.start as u64,
                yr.end as u64 - 1,
                &mut |b| borders.push(b as usize),
            );
            for b in borders {
                if b < s || b - s + m > dag.len() {
                    continue;
                }
                let q = b - s + 1;
                if !confirmed {
                    stats.verifications += 1;
                    if dag.extract(q, q + m - 1)? != pattern {
                        return Ok(Vec::new());
                    }
                    confirmed = true;
                }
                out.push(q);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub(crate) fn encode(&self, w: &mut Writer) {
        w.u64(self.cap as u64);
        w.u64(self.windows as u64);
        let mut entries: Vec<(&Fingerprint, &Vec<u32>)> = self.splits.iter().collect();
        entries.sort_unstable();
        w.u64(entries.len() as u64);
        for (fp, offsets) in entries {
            w.u64(*fp);
            w.u32s(offsets);
        }
        for keys in [self.left.keys(), self.right.keys()] {
            w.u64(keys.len() as u64);
            for k in keys {
                w.u64(k.border);
                w.u32(k.len);
            }
        }
        self.points.encode(w, |w, &b| w.u64(b));
    }

    pub(crate) fn decode(r: &mut Reader<'_>, n: usize) -> Result<Self> {
        let cap = r.len()?;
        let windows = r.len()?;
        let count = r.len()?;
        if count > r.remaining() / 16 {
            return Err(Error::Format("split dictionary exceeds input".into()));
        }
        let mut splits = FxHashMap::default();
        splits.reserve(count);
        for _ in 0..count {
            let fp = r.u64()?;
            let offsets = r.u32s()?;
            if offsets.iter().any(|&s| s == 0 || s as usize > cap) {
                return Err(Error::Format("split offset out of range".into()));
            }
            splits.insert(fp, offsets);
        }
        let keys = |r: &mut Reader<'_>, left: bool| -> Result<Vec<BorderKey>> {
            let k = r.len()?;
            if k > r.remaining() / 12 {
                return Err(Error::Format("border keys exceed input".into()));
            }
            (0..k)
                .map(|_| {
                    let key = BorderKey { border: r.u64()?, len: r.u32()? };
                    let b = key.border as usize;
                    let ok = b >= 1
                        && b <= n
                        && key.len as usize <= cap
                        && if left { (key.len as usize) < b } else { b - 1 + key.len as usize <= n };
                    if ok {
                        Ok(key)
                    } else {
                        Err(Error::Format(format!("invalid border key {key:?}")))
                    }
                })
                .collect()
        };
        let left = WeakPrefixSet::from_sorted(keys(r, true)?);
        let right = WeakPrefixSet::from_sorted(keys(r, false)?);
        let points = RangePointSet::decode(r, |r| {
            let b = r.u64()?;
            if b == 0 || b as usize > n {
                return Err(Error::Format("border out of range".into()));
            }
            Ok(b)
        })?;
        Ok(Self { cap, splits, left, right, points, windows })
    }

    pub fn size_bytes(&self) -> usize {
        self.splits.values().map(|v| 8 + 4 * v.len()).sum::<usize>()
            + (self.left.len() + self.right.len()) * 12
            + self.points.size_bytes()
    }
}

fn search<T: KeyText<Key = BorderKey>>(
    set: &WeakPrefixSet<BorderKey>,
    text: &T,
    needle: Needle<'_>,
    len: usize,
    trusted: bool,
) -> Option<std::ops::Range<usize>> {
    if !trusted {
        return set.query_exact(text, needle, len);
    }
    let range = set.query(text, needle, len)?;
    let fp = needle.prefix_fp(len);
    let ok = |k: &BorderKey| text.key_len(k) >= len && text.key_prefix_fp(k, len) == fp;
    (ok(set.key(range.start)) && ok(set.key(range.end - 1))).then_some(range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_search;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        text: Vec<u8>,
        parse: Lz77Parse,
        dag: SignatureDag,
    }

    fn fixture(text: Vec<u8>) -> Fixture {
        let parse = Lz77Parse::parse(&text).unwrap();
        let dag = SignatureDag::build(&text, 3).unwrap();
        Fixture { text, parse, dag }
    }

    fn primaries(f: &Fixture, p: &[u8]) -> Vec<usize> {
        naive_search(&f.text, p).into_iter().filter(|&q| f.parse.is_primary(q, p.len()).unwrap()).collect()
    }

    fn mutated_copies(seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base: Vec<u8> = (0..200).map(|_| b'a' + rng.gen_range(0..4)).collect();
        let mut text = base.clone();
        for _ in 0..5 {
            let mut copy = base.clone();
            for _ in 0..4 {
                let i = rng.gen_range(0..copy.len());
                copy[i] = b'a' + rng.gen_range(0..4);
            }
            text.extend(copy);
        }
        text
    }

    #[test]
    fn window_count_is_bounded() {
        let f = fixture(mutated_copies(1));
        let cap = 6;
        let index = SemiShortIndex::build(&f.text, &f.parse, cap, f.dag.fingerprint_fn());
        assert!(index.num_windows() <= f.parse.z() * cap * cap);
        assert!(SemiShortIndex::collision_free(&f.text, &f.parse, cap, f.dag.fingerprint_fn()));
        let mut seen = 0;
        for_each_border_window(&f.parse, cap, |p, len, s| {
            seen += 1;
            assert!(s <= cap && s <= len);
            let b = p + s - 1;
            assert!(f.parse.borders().contains(&b));
            assert!(!f.parse.contains_border(p, b - 1));
        });
        assert_eq!(seen, index.num_windows());
    }

    #[test]
    fn every_window_is_found() {
        let f = fixture(mutated_copies(2));
        let cap = 5;
        let index = SemiShortIndex::build(&f.text, &f.parse, cap, f.dag.fingerprint_fn());
        let mut checked = 0;
        for_each_border_window(&f.parse, cap, |p, len, _| {
            if checked % 7 == 0 {
                let pat = &f.text[p - 1..p - 1 + len];
                for trusted in [true, false] {
                    let got = index.query(&f.dag, pat, trusted, &mut SemiStats::default()).unwrap();
                    assert!(!got.is_empty());
                    assert_eq!(got, primaries(&f, pat));
                }
            }
            checked += 1;
        });
    }

    #[test]
    fn random_patterns_match_oracle() {
        let f = fixture(mutated_copies(3));
        let cap = 8;
        let index = SemiShortIndex::build(&f.text, &f.parse, cap, f.dag.fingerprint_fn());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let m = rng.gen_range(1..=cap);
            let p: Vec<u8> = if rng.gen_bool(0.7) {
                let i = rng.gen_range(0..=f.text.len() - m);
                f.text[i..i + m].to_vec()
            } else {
                (0..m).map(|_| b'a' + rng.gen_range(0..5)).collect()
            };
            let mut stats = SemiStats::default();
            assert_eq!(index.query(&f.dag, &p, true, &mut stats).unwrap(), primaries(&f, &p));
            assert!(stats.verifications <= 1);
        }
    }

    #[test]
    fn absent_pattern_and_forced_hit() {
        let f = fixture(b"abcabcabdabcabd".to_vec());
        let index = SemiShortIndex::build(&f.text, &f.parse, 4, f.dag.fingerprint_fn());
        let mut stats = SemiStats::default();
        assert!(index.query(&f.dag, b"zz", true, &mut stats).unwrap().is_empty());
        assert_eq!(stats.dictionary_hits, 0);
        assert_eq!(stats.prefix_searches, 0);
        // Pretend the dictionary claimed every split for a string that does not occur.
        for p in [&b"cabc"[..], b"bdab", b"dabd"] {
            let mut stats = SemiStats::default();
            let got = index.query_splits(&f.dag, p, &[1, 2, 3, 4], true, &mut stats).unwrap();
            assert_eq!(got, primaries(&f, p));
            assert!(stats.verifications <= 1);
        }
        assert!(index.query(&f.dag, b"abcab", true, &mut SemiStats::default()).is_err());
    }

    #[test]
    fn constant_fingerprints_stay_exact() {
        let text = mutated_copies(5);
        let parse = Lz77Parse::parse(&text).unwrap();
        let build = SignatureDag::build_traced(&text, 3, FingerprintFn::constant_zero()).unwrap();
        let hash = FingerprintFn::constant_zero();
        assert!(!SemiShortIndex::collision_free(&text, &parse, 4, &hash));
        let index = SemiShortIndex::build(&text, &parse, 4, &hash);
        let f = Fixture { text, parse, dag: build.dag };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let m = rng.gen_range(1..=4);
            let i = rng.gen_range(0..=f.text.len() - m);
            let p = f.text[i..i + m].to_vec();
            assert_eq!(index.query(&f.dag, &p, false, &mut SemiStats::default()).unwrap(), primaries(&f, &p));
        }
    }

    #[test]
    fn false_dictionary_hit_is_rejected() {
        // Under a constant function every string shares one dictionary entry
        // and the trusted searches accept any key, so only extraction can
        // tell that the pattern is absent.
        let text = b"abcabcabdabcabd".to_vec();
        let parse = Lz77Parse::parse(&text).unwrap();
        let hash = FingerprintFn::constant_zero();
        let dag = SignatureDag::build_traced(&text, 3, hash.clone()).unwrap().dag;
        let index = SemiShortIndex::build(&text, &parse, 4, &hash);
        let mut stats = SemiStats::default();
        assert!(index.query(&dag, b"ddd", true, &mut stats).unwrap().is_empty());
        assert_eq!(stats.dictionary_hits, 1);
        assert_eq!(stats.verifications, 1);
    }

    #[test]
    fn serialization_roundtrip() {
        let f = fixture(mutated_copies(7));
        let index = SemiShortIndex::build(&f.text, &f.parse, 5, f.dag.fingerprint_fn());
        let mut w = Writer::new();
        index.encode(&mut w);
        let bytes = w.into_bytes();
        assert_eq!(SemiShortIndex::decode(&mut Reader::new(&bytes), f.text.len()).unwrap(), index);
    }
}
