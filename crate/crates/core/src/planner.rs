//! The query facade: builds the sub-indexes a mode needs and routes each
//! pattern to one of them by length.

use std::fmt;
use std::hash::Hasher;
use std::path::Path;
use std::str::FromStr;

use fnv::FnvHasher;
use rustc_hash::FxHashSet;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintFn, PrefixFingerprints};
use crate::grammar::{attempt_seed, SignatureDag};
use crate::long::{LongIndex, LongQueryOptions, LongStats, SplitStrategy};
use crate::lz77::Lz77Parse;
use crate::secondary::SecondaryExpander;
use crate::semishort::{for_each_border_window, SemiShortIndex, SemiStats};
use crate::short::ShortIndex;

const MAGIC: &[u8; 4] = b"SIGX";
pub const FORMAT_VERSION: u32 = 1;

/// Fingerprint functions tried before falling back to exact comparisons.
pub const MAX_FINGERPRINT_ATTEMPTS: u32 = 16;

/// Short-index radius used by the modes that do not size it from `z`.
pub const MIN_SHORT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Short, semi-short and long structures.
    #[default]
    Full,
    /// Long structure behind a bit filter for patterns up to the semi-short cap.
    Expected,
    /// Long structure only.
    Lean,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Full, Mode::Expected, Mode::Lean];

    fn code(self) -> u8 {
        match self {
            Mode::Full => 0,
            Mode::Expected => 1,
            Mode::Lean => 2,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        Mode::ALL.get(c as usize).copied().ok_or_else(|| Error::Format(format!("unknown mode {c}")))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Expected => "expected",
            Mode::Lean => "lean",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Mode::Full),
            "expected" => Ok(Mode::Expected),
            "lean" => Ok(Mode::Lean),
            _ => Err(format!("unknown mode {s:?} (expected full, expected or lean)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlannerConfig {
    pub mode: Mode,
    /// Exponent of the semi-short cap `⌈lg^ε z⌉`, in `(0, 1/3]`.
    pub epsilon: f64,
    pub seed: u64,
    /// Replaces the semi-short cap. With the default exponent the cap is
    /// `max(k, ⌈lg^ε z⌉) = k` for every realistic `z`, which leaves the
    /// semi-short band empty; this opens it up.
    pub semishort_cap: Option<usize>,
    /// Forces a fingerprint function instead of drawing one from the seed.
    pub fingerprint: Option<FingerprintFn>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { mode: Mode::Full, epsilon: 1.0 / 3.0, seed: 0x5167_0001, semishort_cap: None, fingerprint: None }
    }
}

impl PlannerConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `(k_short, L_semishort)` for `z` phrases.
pub fn thresholds(z: usize, epsilon: f64, semishort_cap: Option<usize>) -> (usize, usize) {
    let (k, l) = if z < 16 {
        (MIN_SHORT, MIN_SHORT)
    } else {
        let lg = (z as f64).log2();
        let k = MIN_SHORT.max(lg.log2().ceil() as usize);
        (k, k.max(lg.powf(epsilon).ceil() as usize))
    };
    (k, semishort_cap.map_or(l, |cap| cap.max(k)))
}

/// One bit per string of `B`, addressed by fingerprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitFilter {
    words: Vec<u64>,
    /// Distinct fingerprints inserted.
    entries: usize,
}

impl BitFilter {
    pub fn table_size(z: usize, epsilon: f64) -> usize {
        let lg = (z.max(2) as f64).log2();
        ((z as f64 * lg.powf(3.0 * epsilon)).ceil() as usize).max(64).next_power_of_two()
    }

    pub fn build(text: &[u8], parse: &Lz77Parse, cap: usize, epsilon: f64, hash: &FingerprintFn) -> Self {
        let size = Self::table_size(parse.z(), epsilon);
        let prefix = PrefixFingerprints::new(text, hash);
        let mut fps = FxHashSet::default();
        for_each_border_window(parse, cap, |p, len, _| {
            fps.insert(prefix.get(p, p + len - 1));
        });
        let mut words = vec![0u64; size / 64];
        for &fp in &fps {
            let bit = (fp as usize) & (size - 1);
            words[bit / 64] |= 1 << (bit % 64);
        }
        Self { words, entries: fps.len() }
    }

    pub fn contains(&self, fp: Fingerprint) -> bool {
        let bit = (fp as usize) & (self.size() - 1);
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn size(&self) -> usize {
        self.words.len() * 64
    }

    pub fn entries(&self) -> usize {
        self.entries
    }

    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn encode(&self, w: &mut Writer) {
        w.u64(self.entries as u64);
        w.u64s(&self.words);
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let entries = r.len()?;
        let words = r.u64s()?;
        if words.is_empty() || !words.len().is_power_of_two() {
            return Err(Error::Format("filter size is not a power of two".into()));
        }
        Ok(Self { words, entries })
    }
}

/// Which structure answered a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Empty pattern or longer than the text.
    #[default]
    Trivial,
    Short,
    SemiShort,
    Long,
    FilterRejected,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryTrace {
    pub route: Route,
    pub filter_checks: usize,
    pub long: LongStats,
    pub semi: SemiStats,
    pub primaries: usize,
}

impl QueryTrace {
    /// Work done inside the long structure.
    pub fn long_probes(&self) -> usize {
        self.long.splits + self.long.prefix_searches
    }
}

/// Sizes and counts describing a built index.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexStats {
    pub n: usize,
    pub z: usize,
    pub mode: Mode,
    pub epsilon: f64,
    pub k_short: usize,
    pub l_semishort: usize,
    pub dag_nodes: usize,
    pub dag_edges: usize,
    pub dag_height: u32,
    pub grammar_seed: u64,
    pub fingerprint_seed: u64,
    pub trusted: bool,
    pub long_points: usize,
    pub short_symbols: usize,
    pub semishort_windows: Option<usize>,
    pub semishort_strings: Option<usize>,
    pub filter_bits: Option<usize>,
    pub filter_entries: Option<usize>,
    pub filter_ones: Option<usize>,
    /// Encoded bytes per file section, in file order.
    pub sections: Vec<(&'static str, usize)>,
}

pub const SECTION_NAMES: [&str; 6] = ["parse", "dag", "long", "short", "semishort", "filter"];

#[derive(Clone)]
pub struct CompressedIndex {
    mode: Mode,
    epsilon: f64,
    seed: u64,
    k_short: usize,
    l_semishort: usize,
    trusted: bool,
    parse: Lz77Parse,
    dag: SignatureDag,
    long: LongIndex,
    short: ShortIndex,
    semishort: Option<SemiShortIndex>,
    filter: Option<BitFilter>,
    secondary: SecondaryExpander,
}

impl fmt::Debug for CompressedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompressedIndex")
            .field("mode", &self.mode)
            .field("n", &self.len())
            .field("z", &self.parse.z())
            .field("k_short", &self.k_short)
            .field("l_semishort", &self.l_semishort)
            .field("trusted", &self.trusted)
            .finish_non_exhaustive()
    }
}

fn fingerprint_seed(seed: u64, attempt: u32) -> u64 {
    attempt_seed(seed ^ 0x0F1E_2D3C_4B5A_6978, attempt + 1)
}

impl CompressedIndex {
    pub fn build(text: &[u8], config: &PlannerConfig) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        if !(config.epsilon > 0.0 && config.epsilon <= 1.0 / 3.0 + 1e-12) {
            return Err(Error::Format(format!("epsilon {} outside (0, 1/3]", config.epsilon)));
        }
        let parse = Lz77Parse::parse(text)?;
        let z = parse.z();
        let (k_short, l_semishort) = thresholds(z, config.epsilon, config.semishort_cap);
        let mode = config.mode;
        let uses_b = mode != Mode::Lean;

        let first = config.fingerprint.clone().unwrap_or_else(|| FingerprintFn::from_seed(fingerprint_seed(config.seed, 0)));
        let build = SignatureDag::build_traced(text, config.seed, first)?;
        let mut dag = build.dag;
        let long = LongIndex::build(&dag, &build.first_pos, text);
        drop(build.first_pos);

        let mut trusted = false;
        let attempts = if config.fingerprint.is_some() { 1 } else { MAX_FINGERPRINT_ATTEMPTS };
        for attempt in 0..attempts {
            if attempt > 0 {
                dag.set_fingerprint_fn(FingerprintFn::from_seed(fingerprint_seed(config.seed, attempt)));
            }
            let hash = dag.fingerprint_fn();
            trusted = !hash.is_degenerate()
                && long.keys_collision_free(&dag)
                && (!uses_b || SemiShortIndex::collision_free(text, &parse, l_semishort, hash));
            if trusted {
                break;
            }
        }

        let hash = dag.fingerprint_fn().clone();
        let short = ShortIndex::build(text, &parse, if mode == Mode::Full { k_short } else { MIN_SHORT });
        let semishort = (mode == Mode::Full && l_semishort > k_short)
            .then(|| SemiShortIndex::build(text, &parse, l_semishort, &hash));
        let filter =
            (mode == Mode::Expected).then(|| BitFilter::build(text, &parse, l_semishort, config.epsilon, &hash));
        let secondary = SecondaryExpander::build(&parse);
        Ok(Self {
            mode,
            epsilon: config.epsilon,
            seed: config.seed,
            k_short,
            l_semishort,
            trusted,
            parse,
            dag,
            long,
            short,
            semishort,
            filter,
            secondary,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.parse.n()
    }

    pub fn is_empty(&self) -> bool {
        self.parse.n() == 0
    }

    pub fn k_short(&self) -> usize {
        self.k_short
    }

    pub fn l_semishort(&self) -> usize {
        self.l_semishort
    }

    /// Whether the fingerprint function was verified collision-free over
    /// the keys it is used on. Otherwise every search compares symbols.
    pub fn is_trusted(&self) -> bool {
        self.trusted
    }

    pub fn parse(&self) -> &Lz77Parse {
        &self.parse
    }

    pub fn dag(&self) -> &SignatureDag {
        &self.dag
    }

    pub fn filter(&self) -> Option<&BitFilter> {
        self.filter.as_ref()
    }

    pub fn semishort(&self) -> Option<&SemiShortIndex> {
        self.semishort.as_ref()
    }

    /// Sorted 1-based occurrences of `pattern`.
    pub fn locate(&self, pattern: &[u8]) -> Vec<usize> {
        self.locate_traced(pattern).0
    }

    pub fn locate_traced(&self, pattern: &[u8]) -> (Vec<usize>, QueryTrace) {
        let mut trace = QueryTrace::default();
        let m = pattern.len();
        if m == 0 || m > self.len() {
            return (Vec::new(), trace);
        }
        let out = match self.mode {
            Mode::Full if m <= self.k_short => self.via_short(pattern, &mut trace),
            Mode::Full if m <= self.l_semishort => self.via_semishort(pattern, &mut trace),
            Mode::Expected if m <= self.l_semishort => {
                let filter = self.filter.as_ref().expect("expected mode builds a filter");
                trace.filter_checks += 1;
                if !filter.contains(self.dag.fingerprint_fn().of(pattern)) {
                    trace.route = Route::FilterRejected;
                    Vec::new()
                } else if m >= 2 {
                    self.via_long(pattern, &mut trace)
                } else {
                    self.via_short(pattern, &mut trace)
                }
            }
            Mode::Lean | Mode::Expected if m < 2 => self.via_short(pattern, &mut trace),
            _ => self.via_long(pattern, &mut trace),
        };
        (out, trace)
    }

    fn via_short(&self, pattern: &[u8], trace: &mut QueryTrace) -> Vec<usize> {
        trace.route = Route::Short;
        let prim = self.short.primary_occurrences(pattern, &self.parse).expect("pattern within short radius");
        trace.primaries = prim.len();
        self.secondary.expand(&prim, pattern.len(), &self.parse)
    }

    fn via_semishort(&self, pattern: &[u8], trace: &mut QueryTrace) -> Vec<usize> {
        trace.route = Route::SemiShort;
        let semi = self.semishort.as_ref().expect("semi-short band implies a semi-short index");
        let prim = semi.query(&self.dag, pattern, self.trusted, &mut trace.semi).expect("pattern within semi-short cap");
        trace.primaries = prim.len();
        self.secondary.expand(&prim, pattern.len(), &self.parse)
    }

    fn via_long(&self, pattern: &[u8], trace: &mut QueryTrace) -> Vec<usize> {
        trace.route = Route::Long;
        let options = LongQueryOptions { trusted: self.trusted, splits: SplitStrategy::Sparse };
        self.long.query(&self.dag, pattern, options, &mut trace.long).expect("pattern of length at least 2")
    }

    /// Symbols `i..=j` (1-based) of the text.
    pub fn extract(&self, i: usize, j: usize) -> Result<Vec<u8>> {
        self.dag.extract(i, j)
    }

    fn sections(&self) -> [Vec<u8>; 6] {
        let encode = |f: &dyn Fn(&mut Writer)| {
            let mut w = Writer::new();
            f(&mut w);
            w.into_bytes()
        };
        [
            encode(&|w| self.parse.encode(w)),
            encode(&|w| self.dag.encode(w)),
            encode(&|w| self.long.encode(w, &self.dag)),
            encode(&|w| self.short.encode(w)),
            self.semishort.as_ref().map_or_else(Vec::new, |s| encode(&|w| s.encode(w))),
            self.filter.as_ref().map_or_else(Vec::new, |f| encode(&|w| f.encode(w))),
        ]
    }

    pub fn stats(&self) -> IndexStats {
        let sizes = self.sections().map(|s| s.len());
        IndexStats {
            n: self.len(),
            z: self.parse.z(),
            mode: self.mode,
            epsilon: self.epsilon,
            k_short: self.k_short,
            l_semishort: self.l_semishort,
            dag_nodes: self.dag.num_nodes(),
            dag_edges: self.dag.num_edges(),
            dag_height: self.dag.height(),
            grammar_seed: self.dag.seed(),
            fingerprint_seed: self.dag.fingerprint_fn().seed(),
            trusted: self.trusted,
            long_points: self.long.num_points(),
            short_symbols: self.short.len(),
            semishort_windows: self.semishort.as_ref().map(|s| s.num_windows()),
            semishort_strings: self.semishort.as_ref().map(|s| s.num_strings()),
            filter_bits: self.filter.as_ref().map(|f| f.size()),
            filter_entries: self.filter.as_ref().map(|f| f.entries()),
            filter_ones: self.filter.as_ref().map(|f| f.ones()),
            sections: SECTION_NAMES.iter().copied().zip(sizes).collect(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        for &b in MAGIC {
            w.u8(b);
        }
        w.u32(FORMAT_VERSION);
        w.u64(self.len() as u64);
        w.u64(self.parse.z() as u64);
        w.u8(self.mode.code());
        w.f64(self.epsilon);
        w.u64(self.seed);
        let hash = self.dag.fingerprint_fn();
        w.u64(hash.seed());
        w.u8(hash.is_degenerate() as u8);
        w.u8(self.trusted as u8);
        w.u64(self.k_short as u64);
        w.u64(self.l_semishort as u64);
        for s in self.sections() {
            w.section(s);
        }
        let mut bytes = w.into_bytes();
        let sum = checksum(&bytes);
        bytes.extend_from_slice(&sum.to_le_bytes());
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 || &bytes[..4] != MAGIC {
            return Err(Error::Format("missing SIGX magic".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Version(version));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        let computed = checksum(body);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let mut r = Reader::new(&body[8..]);
        let n = r.len()?;
        let z = r.len()?;
        let mode = Mode::from_code(r.u8()?)?;
        let epsilon = r.f64()?;
        let seed = r.u64()?;
        let fp_seed = r.u64()?;
        let hash = if r.u8()? != 0 { FingerprintFn::constant_zero() } else { FingerprintFn::from_seed(fp_seed) };
        let trusted = r.u8()? != 0;
        let k_short = r.len()?;
        let l_semishort = r.len()?;

        let parse = Lz77Parse::decode(&mut r.section()?)?;
        if parse.n() != n || parse.z() != z {
            return Err(Error::Format("header disagrees with parse".into()));
        }
        let dag = SignatureDag::decode(&mut r.section()?, hash)?;
        if dag.len() != n {
            return Err(Error::Format("grammar length disagrees with header".into()));
        }
        let long = LongIndex::decode(&mut r.section()?, &dag)?;
        let short = ShortIndex::decode(&mut r.section()?, n)?;
        let mut section = r.section()?;
        let semishort = (!section.is_empty()).then(|| SemiShortIndex::decode(&mut section, n)).transpose()?;
        let mut section = r.section()?;
        let filter = (!section.is_empty()).then(|| BitFilter::decode(&mut section)).transpose()?;
        r.finish("index file")?;

        let required = match mode {
            Mode::Full => l_semishort <= k_short || semishort.is_some(),
            Mode::Expected => filter.is_some(),
            Mode::Lean => true,
        };
        if !required {
            return Err(Error::Format(format!("{mode} index is missing a section")));
        }
        let secondary = SecondaryExpander::build(&parse);
        Ok(Self {
            mode,
            epsilon,
            seed,
            k_short,
            l_semishort,
            trusted,
            parse,
            dag,
            long,
            short,
            semishort,
            filter,
            secondary,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

fn checksum(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_search;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn copies(seed: u64, len: usize, k: usize) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..4)).collect();
        let mut text = base.clone();
        for _ in 1..k {
            let mut copy = base.clone();
            for _ in 0..3 {
                let i = rng.gen_range(0..copy.len());
                copy[i] = b'a' + rng.gen_range(0..4);
            }
            text.extend(copy);
        }
        text
    }

    #[test]
    fn thresholds_clamp_and_grow() {
        assert_eq!(thresholds(1, 1.0 / 3.0, None), (4, 4));
        assert_eq!(thresholds(15, 1.0 / 3.0, None), (4, 4));
        assert_eq!(thresholds(1 << 20, 1.0 / 3.0, None), (5, 5));
        assert_eq!(thresholds(1 << 20, 1.0 / 3.0, Some(12)), (5, 12));
        assert_eq!(thresholds(1 << 20, 1.0 / 3.0, Some(2)), (5, 5));
    }

    #[test]
    fn filter_size_is_a_power_of_two() {
        assert_eq!(BitFilter::table_size(1, 1.0 / 3.0), 64);
        assert_eq!(BitFilter::table_size(1000, 1.0 / 3.0), 16384);
    }

    #[test]
    fn modes_agree_with_oracle() {
        let text = copies(1, 400, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let indexes: Vec<CompressedIndex> = Mode::ALL
            .iter()
            .map(|&mode| {
                let config = PlannerConfig { mode, semishort_cap: Some(10), ..PlannerConfig::default() };
                CompressedIndex::build(&text, &config).unwrap()
            })
            .collect();
        assert!(indexes[0].semishort().is_some());
        assert!(indexes[2].semishort().is_none() && indexes[2].filter().is_none());
        for _ in 0..400 {
            let m = rng.gen_range(1..40);
            let p: Vec<u8> = if rng.gen_bool(0.8) {
                let i = rng.gen_range(0..=text.len() - m);
                text[i..i + m].to_vec()
            } else {
                (0..m).map(|_| b'a' + rng.gen_range(0..5)).collect()
            };
            let want = naive_search(&text, &p);
            for index in &indexes {
                assert_eq!(index.locate(&p), want, "{} {p:?}", index.mode());
            }
        }
    }

    #[test]
    fn routes_follow_bands() {
        let text = copies(3, 300, 4);
        let config = PlannerConfig { semishort_cap: Some(8), ..PlannerConfig::default() };
        let index = CompressedIndex::build(&text, &config).unwrap();
        let k = index.k_short();
        assert_eq!(index.locate_traced(&text[..k]).1.route, Route::Short);
        assert_eq!(index.locate_traced(&text[..k + 1]).1.route, Route::SemiShort);
        assert_eq!(index.locate_traced(&text[..9]).1.route, Route::Long);
        assert_eq!(index.locate_traced(b"").1.route, Route::Trivial);
    }

    #[test]
    fn filter_rejects_without_long_probes() {
        let text = copies(4, 500, 4);
        let config = PlannerConfig::default().with_mode(Mode::Expected);
        let index = CompressedIndex::build(&text, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rejected = 0;
        for _ in 0..200 {
            let p: Vec<u8> = (0..index.l_semishort()).map(|_| b'e' + rng.gen_range(0..3)).collect();
            let (got, trace) = index.locate_traced(&p);
            assert!(got.is_empty());
            if trace.route == Route::FilterRejected {
                rejected += 1;
                assert_eq!(trace.long_probes(), 0);
            }
        }
        assert!(rejected > 20, "{rejected}");
    }

    #[test]
    fn file_roundtrip_and_corruption() {
        let text = copies(6, 200, 5);
        for mode in Mode::ALL {
            let config = PlannerConfig { mode, semishort_cap: Some(7), ..PlannerConfig::default() };
            let index = CompressedIndex::build(&text, &config).unwrap();
            let bytes = index.to_bytes();
            assert_eq!(bytes, CompressedIndex::build(&text, &config).unwrap().to_bytes());
            let back = CompressedIndex::from_bytes(&bytes).unwrap();
            assert_eq!(back.to_bytes(), bytes);
            for i in [0, 50, 123, 199] {
                let p = &text[i..i + 12];
                assert_eq!(back.locate(p), index.locate(p));
            }
            let mut bad = bytes.clone();
            let at = bad.len() / 2;
            bad[at] ^= 1;
            assert!(matches!(CompressedIndex::from_bytes(&bad), Err(Error::Checksum { .. })));
            let mut old = bytes.clone();
            old[4] = 9;
            assert!(matches!(CompressedIndex::from_bytes(&old), Err(Error::Version(9))));
        }
    }

    #[test]
    fn degenerate_fingerprints_fall_back_to_exact_search() {
        let text = copies(7, 300, 4);
        let config = PlannerConfig {
            semishort_cap: Some(8),
            fingerprint: Some(FingerprintFn::constant_zero()),
            ..PlannerConfig::default()
        };
        for mode in Mode::ALL {
            let index = CompressedIndex::build(&text, &config.clone().with_mode(mode)).unwrap();
            assert!(!index.is_trusted());
            let back = CompressedIndex::from_bytes(&index.to_bytes()).unwrap();
            for i in (0..text.len() - 30).step_by(37) {
                for m in [1, 3, 6, 8, 20] {
                    let p = &text[i..i + m];
                    assert_eq!(index.locate(p), naive_search(&text, p));
                    assert_eq!(back.locate(p), naive_search(&text, p));
                }
            }
        }
    }
}
