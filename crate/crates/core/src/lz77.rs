//! Greedy self-referential LZ77 parse, phrase starts and borders.
//!
//! All positions are 1-based. Phrase `i` covers `S[u_i, u_i + l_i]`: a copy of
//! length `l_i` from source `s_i < u_i` followed by the literal `S[u_i + l_i]`.
//! The position of that literal is the phrase's *border*. The last phrase may
//! end with its copy exactly at `n`, in which case it has no literal and
//! contributes no border.

use crate::error::{check_range, Error, Result};
use crate::suffix::{inverse, lcp_array, suffix_array, MinSegTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phrase {
    /// 1-based source position, 0 when `copy_len == 0`.
    pub source: usize,
    pub copy_len: usize,
    pub literal: Option<u8>,
}

impl Phrase {
    pub fn len(&self) -> usize {
        self.copy_len + usize::from(self.literal.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz77Parse {
    n: usize,
    phrases: Vec<Phrase>,
    starts: Vec<usize>,
    borders: Vec<usize>,
}

impl Lz77Parse {
    /// Greedy leftmost-longest parse. Among sources achieving the maximal copy
    /// length the smallest one is chosen, so the parse is fully determined by `text`.
    pub fn parse(text: &[u8]) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        let n = text.len();
        let sa = suffix_array(text);
        let rank = inverse(&sa);
        let lcp = MinSegTree::new(&lcp_array(text, &sa, &rank));
        let sa_min = MinSegTree::new(&sa);

        // Nearest suffixes in lexicographic order that start earlier in the text.
        const NONE: u32 = u32::MAX;
        let mut psv = vec![NONE; n];
        let mut nsv = vec![NONE; n];
        let mut stack: Vec<u32> = Vec::new();
        for &p in &sa {
            while stack.last().is_some_and(|&top| top > p) {
                stack.pop();
            }
            psv[p as usize] = stack.last().copied().unwrap_or(NONE);
            stack.push(p);
        }
        stack.clear();
        for &p in sa.iter().rev() {
            while stack.last().is_some_and(|&top| top > p) {
                stack.pop();
            }
            nsv[p as usize] = stack.last().copied().unwrap_or(NONE);
            stack.push(p);
        }

        let common = |a: usize, b: usize| {
            let mut k = 0;
            while b + k < n && text[a + k] == text[b + k] {
                k += 1;
            }
            k
        };

        let mut phrases = Vec::new();
        let mut i = 0;
        while i < n {
            let mut best = 0;
            for cand in [psv[i], nsv[i]] {
                if cand != NONE {
                    best = best.max(common(cand as usize, i));
                }
            }
            if best == 0 {
                phrases.push(Phrase { source: 0, copy_len: 0, literal: Some(text[i]) });
                i += 1;
                continue;
            }
            // Every suffix sharing `best` symbols with suffix i sits in one rank
            // interval around rank[i]; the leftmost source is its minimum entry.
            let r = rank[i] as usize;
            let lo = lcp.last_less(r, best as u32).unwrap_or(0);
            let hi = lcp.first_less(r + 1, best as u32).map_or(n - 1, |j| j - 1);
            let source = sa_min.min(lo, hi.min(n - 1)) as usize;
            debug_assert!(source < i);
            let literal = text.get(i + best).copied();
            phrases.push(Phrase { source: source + 1, copy_len: best, literal });
            i += best + 1;
        }
        Self::from_phrases(phrases, n)
    }

    /// Assembles a parse from raw phrases, checking the positional arithmetic.
    pub fn from_phrases(phrases: Vec<Phrase>, n: usize) -> Result<Self> {
        if phrases.is_empty() || n == 0 {
            return Err(Error::MalformedParse("empty parse".into()));
        }
        if phrases[0].copy_len != 0 {
            return Err(Error::MalformedParse("first phrase must not copy".into()));
        }
        let mut starts = Vec::with_capacity(phrases.len());
        let mut borders = Vec::with_capacity(phrases.len());
        let mut u = 1usize;
        for (idx, ph) in phrases.iter().enumerate() {
            let last = idx + 1 == phrases.len();
            if ph.is_empty() {
                return Err(Error::MalformedParse(format!("phrase {} is empty", idx + 1)));
            }
            if ph.copy_len > 0 && (ph.source == 0 || ph.source >= u) {
                return Err(Error::MalformedParse(format!(
                    "phrase {} at {u} has source {}",
                    idx + 1,
                    ph.source
                )));
            }
            if ph.literal.is_none() && !last {
                return Err(Error::MalformedParse(format!(
                    "phrase {} lacks a literal but is not last",
                    idx + 1
                )));
            }
            starts.push(u);
            if ph.literal.is_some() {
                borders.push(u + ph.copy_len);
            }
            u += ph.len();
        }
        if u != n + 1 {
            return Err(Error::MalformedParse(format!("phrases cover {} symbols, expected {n}", u - 1)));
        }
        Ok(Self { n, phrases, starts, borders })
    }

    pub fn expand(&self) -> Result<Vec<u8>> {
        let mut out: Vec<u8> = Vec::with_capacity(self.n);
        for (ph, &u) in self.phrases.iter().zip(&self.starts) {
            if out.len() + 1 != u {
                return Err(Error::MalformedParse(format!("phrase start {u} does not follow output")));
            }
            if ph.copy_len > 0 {
                let src = ph.source - 1;
                if src >= out.len() {
                    return Err(Error::MalformedParse(format!("source {} not yet produced", ph.source)));
                }
                // Overlapping copies are allowed, so copy one symbol at a time.
                for k in 0..ph.copy_len {
                    let b = out[src + k];
                    out.push(b);
                }
            }
            if let Some(c) = ph.literal {
                out.push(c);
            }
        }
        if out.len() != self.n {
            return Err(Error::MalformedParse(format!("expanded to {} symbols, expected {}", out.len(), self.n)));
        }
        Ok(out)
    }

    /// Whether `S[p, p+m-1]` contains a border.
    pub fn is_primary(&self, p: usize, m: usize) -> Result<bool> {
        if m == 0 {
            return Err(Error::OutOfRange { start: p, end: p, len: self.n });
        }
        check_range(p, p + m - 1, self.n)?;
        Ok(self.contains_border(p, p + m - 1))
    }

    pub(crate) fn contains_border(&self, from: usize, to: usize) -> bool {
        let idx = self.borders.partition_point(|&b| b < from);
        self.borders.get(idx).is_some_and(|&b| b <= to)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> usize {
        self.phrases.len()
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    pub fn phrase_starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn borders(&self) -> &[usize] {
        &self.borders
    }

    pub(crate) fn encode(&self, w: &mut crate::codec::Writer) {
        w.u64(self.z() as u64);
        w.u64(self.n as u64);
        for ph in &self.phrases {
            w.u64(ph.source as u64);
            w.u64(ph.copy_len as u64);
            w.u8(u8::from(ph.literal.is_some()));
            w.u8(ph.literal.unwrap_or(0));
        }
    }

    pub(crate) fn decode(r: &mut crate::codec::Reader<'_>) -> Result<Self> {
        let z = r.len()?;
        let n = r.len()?;
        let mut phrases = Vec::with_capacity(z.min(r.remaining() / 18));
        for _ in 0..z {
            let source = r.len()?;
            let copy_len = r.len()?;
            let present = r.u8()?;
            let byte = r.u8()?;
            let literal = match present {
                0 => None,
                1 => Some(byte),
                other => return Err(Error::Format(format!("bad literal flag {other}"))),
            };
            phrases.push(Phrase { source, copy_len, literal });
        }
        Self::from_phrases(phrases, n)
    }
}
