//! Primary occurrences of short patterns (`m ≤ k`) from the text around borders.
//!
//! Any occurrence of a pattern of length at most `k` that contains the
//! border `b` lies inside `S[b-k, b+k-1]`. The union of these windows is
//! kept as a handful of text segments; all suffixes starting inside them
//! are sorted, and a query is a binary search followed by a border check.
//! Overlapping windows are merged, so each text position is a suffix start
//! at most once, and it keeps the longest context available to it.

use std::cmp::Ordering;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::lz77::Lz77Parse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortIndex {
    k: usize,
    /// Concatenated segment texts.
    text: Vec<u8>,
    /// `(offset in text, 1-based text position)` of each segment's first symbol.
    segments: Vec<(u32, u64)>,
    /// Offsets into `text`, ordered by the suffix of their segment.
    entries: Vec<u32>,
}

impl ShortIndex {
    pub fn build(text: &[u8], parse: &Lz77Parse, k: usize) -> Self {
        assert!(k >= 1, "context radius must be positive");
        let n = text.len();
        let mut segments: Vec<(usize, usize)> = Vec::new();
        for &b in parse.borders() {
            let (lo, hi) = (b.saturating_sub(k).max(1), (b + k - 1).min(n));
            match segments.last_mut() {
                Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => segments.push((lo, hi)),
            }
        }
        let mut buf = Vec::new();
        let mut table = Vec::with_capacity(segments.len());
        for &(lo, hi) in &segments {
            table.push((buf.len() as u32, lo as u64));
            buf.extend_from_slice(&text[lo - 1..hi]);
        }
        Self::sorted(k, buf, table)
    }

    fn sorted(k: usize, text: Vec<u8>, segments: Vec<(u32, u64)>) -> Self {
        let mut index = Self { k, text, segments, entries: Vec::new() };
        let mut entries: Vec<u32> = (0..index.text.len() as u32).collect();
        entries.sort_by(|&a, &b| index.context(a).cmp(index.context(b)));
        index.entries = entries;
        index
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Symbols indexed, `Θ(zk)`.
    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    fn segment_of(&self, offset: u32) -> usize {
        self.segments.partition_point(|&(o, _)| o <= offset) - 1
    }

    /// Up to `k` symbols starting at `offset`, not crossing its segment end.
    fn context(&self, offset: u32) -> &[u8] {
        let s = self.segment_of(offset);
        let end = self.segments.get(s + 1).map_or(self.text.len(), |&(o, _)| o as usize);
        let o = offset as usize;
        &self.text[o..end.min(o + self.k)]
    }

    fn position(&self, offset: u32) -> usize {
        let (o, pos) = self.segments[self.segment_of(offset)];
        (pos + (offset - o) as u64) as usize
    }

    /// Context starts whose text begins with `pattern`, as 1-based positions.
    pub fn candidates(&self, pattern: &[u8]) -> Result<Vec<usize>> {
        if pattern.is_empty() || pattern.len() > self.k {
            return Err(Error::PatternLength { len: pattern.len(), min: 1, max: self.k });
        }
        let probe = |e: &u32| {
            let c = self.context(*e);
            let l = c.len().min(pattern.len());
            match c[..l].cmp(&pattern[..l]) {
                Ordering::Equal if l < pattern.len() => Ordering::Less,
                ord => ord,
            }
        };
        let lo = self.entries.partition_point(|e| probe(e) == Ordering::Less);
        let hi = self.entries.partition_point(|e| probe(e) != Ordering::Greater);
        Ok(self.entries[lo..hi].iter().map(|&e| self.position(e)).collect())
    }

    /// Sorted primary occurrences of `pattern` (`1 ≤ m ≤ k`).
    pub fn primary_occurrences(&self, pattern: &[u8], parse: &Lz77Parse) -> Result<Vec<usize>> {
        let m = pattern.len();
        let mut out: Vec<usize> =
            self.candidates(pattern)?.into_iter().filter(|&p| parse.contains_border(p, p + m - 1)).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// The entry order is recomputed on load rather than stored.
    pub(crate) fn encode(&self, w: &mut Writer) {
        w.var(self.k as u64);
        w.bytes(&self.text);
        w.var(self.segments.len() as u64);
        let mut prev = (0, 0);
        for &(o, p) in &self.segments {
            w.var((o - prev.0) as u64);
            w.var(p - prev.1);
            prev = (o, p);
        }
    }

    pub(crate) fn decode(r: &mut Reader<'_>, n: usize) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Format(format!("short index: {msg}")));
        let k = r.var_len()?;
        let text = r.bytes()?.to_vec();
        let count = r.var_len()?;
        if count > r.remaining() / 2 {
            return bad("segment table exceeds input");
        }
        let mut segments = Vec::with_capacity(count);
        let mut prev = (0u64, 0u64);
        for i in 0..count {
            let (o, p) = (r.var()?, r.var()?);
            if i > 0 && o == 0 {
                return bad("segment offsets out of order");
            }
            prev = match (prev.0.checked_add(o), prev.1.checked_add(p)) {
                (Some(o), Some(p)) if o <= u32::MAX as u64 => (o, p),
                _ => return bad("segment out of range"),
            };
            segments.push((prev.0 as u32, prev.1));
        }
        if k == 0 {
            return bad("zero radius");
        }
        if segments.first().is_some_and(|s| s.0 != 0) || text.len() > u32::MAX as usize {
            return bad("segment offsets out of order");
        }
        if segments.iter().any(|&(o, p)| o as usize >= text.len() || p == 0 || p as usize > n) {
            return bad("segment out of range");
        }
        if segments.is_empty() != text.is_empty() {
            return bad("text without segments");
        }
        Ok(Self::sorted(k, text, segments))
    }

    pub fn size_bytes(&self) -> usize {
        self.text.len() + self.segments.len() * 12 + self.entries.len() * 4
    }
}
