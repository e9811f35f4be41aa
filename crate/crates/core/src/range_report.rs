//! Static 2D orthogonal range reporting over rank-space points.
//!
//! Points are sorted by `x`; their `y` values, in that order, go into a
//! wavelet matrix. A query turns the `x` interval into an index interval,
//! walks the matrix restricted to `[y1, y2]`, and maps each hit back to its
//! original index with `select`, which gives the payload.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// Plain bitvector with rank and (binary search) select.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
    /// Ones strictly before each word.
    ones_before: Vec<u32>,
}

impl BitVector {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % 64);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut ones_before = Vec::with_capacity(words.len() + 1);
        let mut acc = 0u32;
        for w in &words {
            ones_before.push(acc);
            acc += w.count_ones();
        }
        ones_before.push(acc);
        Self { len, words, ones_before }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        *self.ones_before.last().unwrap() as usize
    }

    /// Ones in `[0, i)`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        let (w, b) = (i / 64, i % 64);
        let mut r = self.ones_before[w] as usize;
        if b > 0 {
            r += (self.words[w] & ((1u64 << b) - 1)).count_ones() as usize;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// Position of the `k`-th one (0-based).
    pub fn select1(&self, k: usize) -> usize {
        let w = self.ones_before.partition_point(|&c| c as usize <= k) - 1;
        w * 64 + select_in_word(self.words[w], k - self.ones_before[w] as usize)
    }

    /// Position of the `k`-th zero (0-based).
    pub fn select0(&self, k: usize) -> usize {
        let zeros_before = |w: usize| w * 64 - self.ones_before[w] as usize;
        let (mut lo, mut hi) = (0, self.words.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if zeros_before(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo * 64 + select_in_word(!self.words[lo], k - zeros_before(lo))
    }

    fn encode(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u64s(&self.words);
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.len()?;
        let words = r.u64s()?;
        if words.len() != len.div_ceil(64) {
            return Err(Error::Format("bitvector length mismatch".into()));
        }
        Ok(Self::from_words(words, len))
    }
}

fn select_in_word(mut word: u64, k: usize) -> usize {
    for _ in 0..k {
        word &= word - 1;
    }
    word.trailing_zeros() as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangePointSet<P> {
    /// x coordinates in sorted order.
    xs: Vec<u64>,
    /// One bitvector per bit of y, most significant first.
    levels: Vec<BitVector>,
    zeros: Vec<usize>,
    /// Payloads in x-sorted order.
    payloads: Vec<P>,
}

impl<P: Copy> RangePointSet<P> {
    pub fn build(mut points: Vec<(u64, u64, P)>) -> Self {
        points.sort_by_key(|&(x, y, _)| (x, y));
        let max_y = points.iter().map(|p| p.1).max().unwrap_or(0);
        let bits = (64 - max_y.leading_zeros()) as usize;
        let xs = points.iter().map(|p| p.0).collect();
        let payloads = points.iter().map(|p| p.2).collect();
        let mut ys: Vec<u64> = points.iter().map(|p| p.1).collect();
        let mut levels = Vec::with_capacity(bits);
        let mut zeros = Vec::with_capacity(bits);
        for l in (0..bits).rev() {
            let bv = BitVector::from_bits(ys.iter().map(|&y| y >> l & 1 == 1));
            zeros.push(bv.len() - bv.count_ones());
            levels.push(bv);
            let (mut lo, hi): (Vec<u64>, Vec<u64>) = ys.iter().partition(|&&y| y >> l & 1 == 0);
            lo.extend(hi);
            ys = lo;
        }
        Self { xs, levels, zeros, payloads }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Payloads of all points in `[x1, x2] × [y1, y2]`, in unspecified order.
    pub fn report(&self, x1: u64, x2: u64, y1: u64, y2: u64) -> Vec<P> {
        let mut out = Vec::new();
        self.report_into(x1, x2, y1, y2, &mut |p| out.push(p));
        out
    }

    pub fn report_into(&self, x1: u64, x2: u64, y1: u64, y2: u64, emit: &mut impl FnMut(P)) {
        if x1 > x2 || y1 > y2 || self.xs.is_empty() {
            return;
        }
        let lo = self.xs.partition_point(|&x| x < x1);
        let hi = self.xs.partition_point(|&x| x <= x2);
        if lo >= hi {
            return;
        }
        let bits = self.levels.len();
        let max = if bits == 0 { 0 } else { u64::MAX >> (64 - bits) };
        if y1 > max {
            return;
        }
        self.walk(0, lo, hi, 0, y1, y2.min(max), emit);
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(&self, level: usize, lo: usize, hi: usize, prefix: u64, y1: u64, y2: u64, emit: &mut impl FnMut(P)) {
        if lo >= hi {
            return;
        }
        let rem = self.levels.len() - level;
        let first = prefix << rem;
        let last = first | if rem == 0 { 0 } else { u64::MAX >> (64 - rem) };
        if last < y1 || first > y2 {
            return;
        }
        if y1 <= first && last <= y2 {
            for pos in lo..hi {
                emit(self.payloads[self.trace_up(level, pos)]);
            }
            return;
        }
        let bv = &self.levels[level];
        let z = self.zeros[level];
        self.walk(level + 1, bv.rank0(lo), bv.rank0(hi), prefix << 1, y1, y2, emit);
        self.walk(level + 1, z + bv.rank1(lo), z + bv.rank1(hi), prefix << 1 | 1, y1, y2, emit);
    }

    /// All points as `(x, y, payload)`, in x order.
    pub fn points(&self) -> Vec<(u64, u64, P)> {
        (0..self.xs.len())
            .map(|i| {
                let (mut pos, mut y) = (i, 0);
                for (bv, &z) in self.levels.iter().zip(&self.zeros) {
                    let bit = bv.get(pos);
                    y = y << 1 | bit as u64;
                    pos = if bit { z + bv.rank1(pos) } else { bv.rank0(pos) };
                }
                (self.xs[i], y, self.payloads[i])
            })
            .collect()
    }

    /// Maps a position in the ordering of `level` back to the x-sorted index.
    fn trace_up(&self, level: usize, mut pos: usize) -> usize {
        for l in (0..level).rev() {
            let z = self.zeros[l];
            pos = if pos < z { self.levels[l].select0(pos) } else { self.levels[l].select1(pos - z) };
        }
        pos
    }

    pub(crate) fn encode(&self, w: &mut Writer, mut payload: impl FnMut(&mut Writer, &P)) {
        w.u64s(&self.xs);
        w.u64(self.levels.len() as u64);
        for bv in &self.levels {
            bv.encode(w);
        }
        for p in &self.payloads {
            payload(w, p);
        }
    }

    pub(crate) fn decode(r: &mut Reader<'_>, mut payload: impl FnMut(&mut Reader<'_>) -> Result<P>) -> Result<Self> {
        let xs = r.u64s()?;
        let nlev = r.len()?;
        if nlev > 64 {
            return Err(Error::Format(format!("{nlev} wavelet levels")));
        }
        let mut levels = Vec::with_capacity(nlev);
        let mut zeros = Vec::with_capacity(nlev);
        for _ in 0..nlev {
            let bv = BitVector::decode(r)?;
            if bv.len() != xs.len() {
                return Err(Error::Format("wavelet level length mismatch".into()));
            }
            zeros.push(bv.len() - bv.count_ones());
            levels.push(bv);
        }
        let payloads = (0..xs.len()).map(|_| payload(r)).collect::<Result<Vec<P>>>()?;
        Ok(Self { xs, levels, zeros, payloads })
    }

    /// Approximate heap size in bytes, for statistics.
    pub fn size_bytes(&self) -> usize {
        self.xs.len() * 8
            + self.levels.iter().map(|b| b.words.len() * 8 + b.ones_before.len() * 4).sum::<usize>()
            + self.payloads.len() * std::mem::size_of::<P>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::linear_range_filter;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<u32>) -> Vec<u32> {
        v.sort_unstable();
        v
    }

    #[test]
    fn bitvector_rank_select() {
        let bits: Vec<bool> = (0..300).map(|i| i % 3 == 0 || i % 7 == 0).collect();
        let bv = BitVector::from_bits(bits.iter().copied());
        let (mut ones, mut zeros) = (0, 0);
        for (i, &b) in bits.iter().enumerate() {
            assert_eq!(bv.rank1(i), ones);
            if b {
                assert_eq!(bv.select1(ones), i);
                ones += 1;
            } else {
                assert_eq!(bv.select0(zeros), i);
                zeros += 1;
            }
        }
        assert_eq!(bv.rank1(300), ones);
    }

    #[test]
    fn empty_and_single() {
        let empty: RangePointSet<u32> = RangePointSet::build(Vec::new());
        assert!(empty.report(0, 10, 0, 10).is_empty());
        let one = RangePointSet::build(vec![(3, 4, 7u32)]);
        assert_eq!(one.report(3, 3, 4, 4), vec![7]);
        assert!(one.report(0, 2, 0, 10).is_empty());
        assert!(one.report(0, 10, 5, 10).is_empty());
        let zero = RangePointSet::build(vec![(0, 0, 1u32)]);
        assert_eq!(zero.report(0, 0, 0, 0), vec![1]);
    }

    #[test]
    fn small_example() {
        let set = RangePointSet::build(vec![(1, 1, 10u32), (2, 3, 20), (3, 2, 30)]);
        assert_eq!(sorted(set.report(1, 2, 1, 3)), vec![10, 20]);
        assert!(set.report(2, 1, 1, 3).is_empty());
        assert!(set.report(1, 3, 3, 2).is_empty());
        assert_eq!(set.points(), vec![(1, 1, 10), (2, 3, 20), (3, 2, 30)]);
    }

    #[test]
    fn random_rectangles_match_linear_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let points: Vec<(u64, u64, u32)> =
            (0..10_000).map(|i| (rng.gen_range(0..5000), rng.gen_range(0..3000), i)).collect();
        let set = RangePointSet::build(points.clone());
        for _ in 0..1000 {
            let (a, b) = (rng.gen_range(0..5200), rng.gen_range(0..5200));
            let (c, d) = (rng.gen_range(0..3200), rng.gen_range(0..3200));
            let expect = sorted(linear_range_filter(&points, (a.min(b), a.max(b)), (c.min(d), c.max(d))));
            assert_eq!(sorted(set.report(a.min(b), a.max(b), c.min(d), c.max(d))), expect);
        }
        // Dominance queries with rank extremes.
        for _ in 0..200 {
            let p = rng.gen_range(0..5000);
            let q = rng.gen_range(0..3000);
            let expect = sorted(linear_range_filter(&points, (0, p), (q, u64::MAX)));
            assert_eq!(sorted(set.report(0, p, q, u64::MAX)), expect);
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let set = RangePointSet::build(vec![(5, 1, 1u32), (2, 9, 2), (5, 5, 3)]);
        let mut w = Writer::new();
        set.encode(&mut w, |w, &p| w.u32(p));
        let bytes = w.into_bytes();
        let back = RangePointSet::decode(&mut Reader::new(&bytes), |r| r.u32()).unwrap();
        assert_eq!(back, set);
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            pts in proptest::collection::vec((0u64..40, 0u64..40), 0..80),
            x in (0u64..45, 0u64..45),
            y in (0u64..45, 0u64..45),
        ) {
            let points: Vec<(u64, u64, u32)> = pts.iter().enumerate().map(|(i, &(a, b))| (a, b, i as u32)).collect();
            let set = RangePointSet::build(points.clone());
            prop_assert_eq!(sorted(set.report(x.0, x.1, y.0, y.1)), sorted(linear_range_filter(&points, x, y)));
        }
    }
}
