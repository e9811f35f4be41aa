//! Suffix-array machinery used during construction only.
//!
//! Nothing here is persisted in an index; it exists so that construction can
//! compare substrings of the input exactly, independent of fingerprints.

use std::cmp::Ordering;

pub(crate) fn suffix_array(text: &[u8]) -> Vec<u32> {
    assert!(text.len() < i32::MAX as usize, "text too large for a 32-bit suffix array");
    let mut sa = vec![0i32; text.len()];
    divsufsort::sort_in_place(text, &mut sa);
    sa.into_iter().map(|x| x as u32).collect()
}

pub(crate) fn inverse(sa: &[u32]) -> Vec<u32> {
    let mut rank = vec![0u32; sa.len()];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r as u32;
    }
    rank
}

/// Kasai et al.: `lcp[r]` is the longest common prefix of suffixes `sa[r-1]` and `sa[r]`.
pub(crate) fn lcp_array(text: &[u8], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Range-minimum segment tree with "nearest smaller" descents.
pub(crate) struct MinSegTree {
    size: usize,
    tree: Vec<u32>,
}

impl MinSegTree {
    pub(crate) fn new(values: &[u32]) -> Self {
        let size = values.len().next_power_of_two().max(1);
        let mut tree = vec![u32::MAX; 2 * size];
        tree[size..size + values.len()].copy_from_slice(values);
        for node in (1..size).rev() {
            tree[node] = tree[2 * node].min(tree[2 * node + 1]);
        }
        Self { size, tree }
    }

    /// Minimum over the inclusive range `[l, r]`.
    pub(crate) fn min(&self, l: usize, r: usize) -> u32 {
        let (mut l, mut r) = (l + self.size, r + self.size + 1);
        let mut best = u32::MAX;
        while l < r {
            if l & 1 == 1 {
                best = best.min(self.tree[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                best = best.min(self.tree[r]);
            }
            l >>= 1;
            r >>= 1;
        }
        best
    }

    /// Largest index `j <= r` with `value[j] < x`.
    pub(crate) fn last_less(&self, r: usize, x: u32) -> Option<usize> {
        self.last_less_in(1, 0, self.size - 1, r, x)
    }

    fn last_less_in(&self, node: usize, lo: usize, hi: usize, r: usize, x: u32) -> Option<usize> {
        if lo > r || self.tree[node] >= x {
            return None;
        }
        if lo == hi {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.last_less_in(2 * node + 1, mid + 1, hi, r, x)
            .or_else(|| self.last_less_in(2 * node, lo, mid, r, x))
    }

    /// Smallest index `j >= l` with `value[j] < x`.
    pub(crate) fn first_less(&self, l: usize, x: u32) -> Option<usize> {
        self.first_less_in(1, 0, self.size - 1, l, x)
    }

    fn first_less_in(&self, node: usize, lo: usize, hi: usize, l: usize, x: u32) -> Option<usize> {
        if hi < l || self.tree[node] >= x {
            return None;
        }
        if lo == hi {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.first_less_in(2 * node, lo, mid, l, x)
            .or_else(|| self.first_less_in(2 * node + 1, mid + 1, hi, l, x))
    }
}

/// Exact lexicographic comparison of arbitrary substrings of one text in
/// `O(lg n)` time, via suffix ranks and an LCP range-minimum structure.
pub(crate) struct SubstringOrder {
    n: usize,
    rank: Vec<u32>,
    lcp: MinSegTree,
}

impl SubstringOrder {
    pub(crate) fn new(text: &[u8]) -> Self {
        let sa = suffix_array(text);
        let rank = inverse(&sa);
        let lcp = lcp_array(text, &sa, &rank);
        Self { n: text.len(), rank, lcp: MinSegTree::new(&lcp) }
    }

    /// Longest common prefix of the suffixes starting at 0-based `a` and `b`.
    pub(crate) fn lcp(&self, a: usize, b: usize) -> usize {
        if a == b {
            return self.n - a;
        }
        let (ra, rb) = (self.rank[a] as usize, self.rank[b] as usize);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.lcp.min(lo + 1, hi) as usize
    }

    /// Compares `text[a..a+la]` with `text[b..b+lb]`.
    pub(crate) fn cmp(&self, a: usize, la: usize, b: usize, lb: usize) -> Ordering {
        let common = la.min(lb);
        if common == 0 || self.lcp(a, b) >= common {
            la.cmp(&lb)
        } else {
            self.rank[a].cmp(&self.rank[b])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_array_matches_sorting() {
        let text = b"mississippi$banana";
        let sa = suffix_array(text);
        let mut naive: Vec<u32> = (0..text.len() as u32).collect();
        naive.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
        assert_eq!(sa, naive);
    }

    #[test]
    fn substring_order_agrees_with_slices() {
        let text = b"abracadabraabracadabra";
        let order = SubstringOrder::new(text);
        for a in 0..text.len() {
            for b in 0..text.len() {
                for la in 0..=(text.len() - a).min(6) {
                    let lb = (text.len() - b).min(4);
                    assert_eq!(
                        order.cmp(a, la, b, lb),
                        text[a..a + la].cmp(&text[b..b + lb]),
                        "{a} {la} {b} {lb}"
                    );
                }
            }
        }
    }

    #[test]
    fn nearest_less_descents() {
        let values = [5, 3, 7, 7, 2, 9, 4];
        let tree = MinSegTree::new(&values);
        assert_eq!(tree.min(2, 3), 7);
        assert_eq!(tree.last_less(3, 4), Some(1));
        assert_eq!(tree.last_less(6, 3), Some(4));
        assert_eq!(tree.last_less(3, 3), None);
        assert_eq!(tree.first_less(2, 5), Some(4));
        assert_eq!(tree.first_less(5, 4), None);
    }
}
