//! Secondary occurrences by copying known occurrences through phrase sources.
//!
//! An occurrence `[p, p+m-1]` lying inside the source `[s_i, s_i+l_i-1]` of
//! phrase `i` reappears at `u_i + (p - s_i)`. Starting from the primary
//! occurrences and repeating this with a worklist reaches every occurrence;
//! each one is produced once because it lies in exactly one phrase body.

use crate::lz77::Lz77Parse;
use crate::range_report::RangePointSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondaryExpander {
    /// `(s_i, s_i + l_i - 1)` per copying phrase, with the phrase index.
    sources: RangePointSet<u32>,
}

impl SecondaryExpander {
    pub fn build(parse: &Lz77Parse) -> Self {
        let points = parse
            .phrases()
            .iter()
            .enumerate()
            .filter(|(_, ph)| ph.copy_len > 0)
            .map(|(i, ph)| (ph.source as u64, (ph.source + ph.copy_len - 1) as u64, i as u32))
            .collect();
        Self { sources: RangePointSet::build(points) }
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    /// All occurrences, sorted, given the sorted primary occurrences of a
    /// pattern of length `m`.
    pub fn expand(&self, primaries: &[usize], m: usize, parse: &Lz77Parse) -> Vec<usize> {
        let mut out = primaries.to_vec();
        let mut work = primaries.to_vec();
        let starts = parse.phrase_starts();
        let phrases = parse.phrases();
        while let Some(p) = work.pop() {
            let end = p + m - 1;
            self.sources.report_into(1, p as u64, end as u64, u64::MAX, &mut |i: u32| {
                let i = i as usize;
                let q = starts[i] + (p - phrases[i].source);
                debug_assert!(q > p);
                debug_assert!(!parse.contains_border(q, q + m - 1));
                out.push(q);
                work.push(q);
            });
        }
        out.sort_unstable();
        debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
        out.dedup();
        out
    }

    pub fn size_bytes(&self) -> usize {
        self.sources.size_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_search;
    use proptest::prelude::*;

    fn primaries(text: &[u8], parse: &Lz77Parse, p: &[u8]) -> Vec<usize> {
        naive_search(text, p).into_iter().filter(|&q| parse.is_primary(q, p.len()).unwrap()).collect()
    }

    #[test]
    fn nothing_from_nothing() {
        let parse = Lz77Parse::parse(b"abab").unwrap();
        assert!(SecondaryExpander::build(&parse).expand(&[], 2, &parse).is_empty());
    }

    #[test]
    fn unary_text() {
        let text = b"aaaa";
        let parse = Lz77Parse::parse(text).unwrap();
        let ex = SecondaryExpander::build(&parse);
        let prim = primaries(text, &parse, b"aa");
        assert_eq!(prim, vec![1]);
        assert_eq!(ex.expand(&prim, 2, &parse), vec![1, 2, 3]);
    }

    #[test]
    fn chained_copies() {
        // The third block copies the second, which copies the first.
        let text = b"abcdXabcdYabcdXabcdZ";
        let parse = Lz77Parse::parse(text).unwrap();
        let ex = SecondaryExpander::build(&parse);
        for p in [&b"bc"[..], b"abcd", b"cdX", b"d"] {
            let prim = primaries(text, &parse, p);
            assert_eq!(ex.expand(&prim, p.len(), &parse), naive_search(text, p), "{p:?}");
        }
    }

    proptest! {
        #[test]
        fn expansion_of_primaries_is_complete(
            text in proptest::collection::vec(0u8..3, 1..300),
            i in any::<proptest::sample::Index>(),
            m in 1usize..12,
        ) {
            let parse = Lz77Parse::parse(&text).unwrap();
            let ex = SecondaryExpander::build(&parse);
            let m = m.min(text.len());
            let i = i.index(text.len() - m + 1);
            let p = &text[i..i + m];
            let prim = primaries(&text, &parse, p);
            prop_assert_eq!(ex.expand(&prim, m, &parse), naive_search(&text, p));
        }
    }
}
