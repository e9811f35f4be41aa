//! Index over the child boundaries of grammar nodes.
//!
//! Every non-terminal `v` with children `c_1 … c_k` contributes one anchor per
//! inner boundary `i ∈ [1, k-1]`: the reversed prefix `pre(v,i) = str(c_1 … c_i)`
//! goes into one key set, the suffix `suf(v,i)` into another, and the pair of
//! ranks becomes a point. A run node contributes its first boundary only.
//!
//! A pattern is split at a few positions derived from its own signature
//! parse. For each split, searching both halves yields a rectangle whose
//! points are nodes containing the pattern across a boundary; every
//! occurrence of such a node in the text is found by walking up the
//! reverse edges.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::fingerprint::{collision_free_by, PrefixFingerprints};
use crate::grammar::{Label, NodeKind, PatternParse, SignatureDag, CONSISTENCY_MARGIN};
use crate::range_report::RangePointSet;
use crate::suffix::SubstringOrder;
use crate::weak_prefix::{KeyText, Needle, WeakPrefixSet};

/// A node boundary: the first `pre_len` symbols of `str(node)` form `pre`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Anchor {
    pub node: Label,
    pub pre_len: u64,
}

/// Keys `rev(pre(v,i))`.
pub struct ReversedPrefixes<'a>(pub &'a SignatureDag);

/// Keys `suf(v,i)`.
pub struct Suffixes<'a>(pub &'a SignatureDag);

impl KeyText for ReversedPrefixes<'_> {
    type Key = Anchor;

    fn key_len(&self, key: &Anchor) -> usize {
        key.pre_len as usize
    }

    fn key_prefix_fp(&self, key: &Anchor, l: usize) -> u64 {
        self.0.range_rfp_raw(key.node, key.pre_len - l as u64, key.pre_len)
    }

    fn key_symbols(&self, key: &Anchor, from: usize, to: usize, out: &mut Vec<u8>) {
        let at = out.len();
        self.0.extract_raw(key.node, key.pre_len - to as u64, key.pre_len - from as u64, out);
        out[at..].reverse();
    }
}

impl KeyText for Suffixes<'_> {
    type Key = Anchor;

    fn key_len(&self, key: &Anchor) -> usize {
        (self.0.node(key.node).len - key.pre_len) as usize
    }

    fn key_prefix_fp(&self, key: &Anchor, l: usize) -> u64 {
        self.0.range_fp_raw(key.node, key.pre_len, key.pre_len + l as u64)
    }

    fn key_symbols(&self, key: &Anchor, from: usize, to: usize, out: &mut Vec<u8>) {
        self.0.extract_raw(key.node, key.pre_len + from as u64, key.pre_len + to as u64, out);
    }
}

/// Which split positions a query tries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStrategy {
    /// The positions from [`split_points`].
    Sparse,
    /// Every position in `[1, m-1]`.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LongQueryOptions {
    /// Whether fingerprint comparisons may be trusted to guide the searches.
    /// Untrusted searches compare extracted symbols instead.
    pub trusted: bool,
    pub splits: SplitStrategy,
}

/// Work done by one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LongStats {
    pub splits: usize,
    /// Weak prefix searches issued (two per split unless the first fails).
    pub prefix_searches: usize,
    /// Distinct `(node, offset)` candidates reported by the rectangles.
    pub candidates: usize,
    /// Candidates confirmed by extraction.
    pub verified: usize,
}

/// Split positions `p ∈ [1, m-1]` (the left part is `P[1, p]`): the ends of
/// the first [`CONSISTENCY_MARGIN`] nodes and the starts of the last ones on
/// every level of the pattern's parse.
pub fn split_points(parse: &PatternParse) -> Result<Vec<usize>> {
    let m = parse.pattern_len();
    if m < 2 {
        return Err(Error::PatternLength { len: m, min: 2, max: usize::MAX });
    }
    let mut points = Vec::new();
    for level in parse.levels() {
        let s = &level.starts;
        let k = s.len();
        for d in 1..=CONSISTENCY_MARGIN {
            for idx in [d, k.wrapping_sub(d)] {
                if idx < k && s[idx] > 0 {
                    points.push(s[idx]);
                }
            }
        }
    }
    points.sort_unstable();
    points.dedup();
    Ok(points)
}

/// Every split of a nonterminal into a nonempty left and right part, in node
/// order. The file format relies on this order being deterministic.
fn anchors(dag: &SignatureDag) -> Vec<Anchor> {
    let mut out = Vec::new();
    for (v, node) in dag.nodes() {
        match node.kind {
            NodeKind::Terminal(_) => {}
            NodeKind::Run { child, .. } => out.push(Anchor { node: v, pre_len: dag.node(child).len }),
            NodeKind::Block { .. } => {
                let ends = dag.child_prefix_lens(v);
                out.extend(ends[..ends.len() - 1].iter().map(|&e| Anchor { node: v, pre_len: e }));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongIndex {
    prefixes: WeakPrefixSet<Anchor>,
    suffixes: WeakPrefixSet<Anchor>,
    points: RangePointSet<Anchor>,
}

impl LongIndex {
    /// `first_pos[v]` is any 1-based occurrence of `str(v)` in `text`; it lets
    /// the keys be sorted exactly with suffix arrays of the text.
    pub fn build(dag: &SignatureDag, first_pos: &[usize], text: &[u8]) -> Self {
        let n = text.len();
        let anchors = anchors(dag);
        let start = |a: &Anchor| first_pos[a.node as usize] - 1;

        let reversed: Vec<u8> = text.iter().rev().copied().collect();
        let order = SubstringOrder::new(&reversed);
        let (prefixes, x) = WeakPrefixSet::build(anchors.clone(), |a, b| {
            let (la, lb) = (a.pre_len as usize, b.pre_len as usize);
            order.cmp(n - start(a) - la, la, n - start(b) - lb, lb)
        });
        drop(order);

        let order = SubstringOrder::new(text);
        let suffix_range = |a: &Anchor| {
            let from = start(a) + a.pre_len as usize;
            (from, start(a) + dag.node(a.node).len as usize - from)
        };
        let (suffixes, y) = WeakPrefixSet::build(anchors.clone(), |a, b| {
            let ((sa, la), (sb, lb)) = (suffix_range(a), suffix_range(b));
            order.cmp(sa, la, sb, lb)
        });
        drop(order);

        let points = anchors.iter().enumerate().map(|(i, &a)| (x[i] as u64, y[i] as u64, a)).collect();
        Self { prefixes, suffixes, points: RangePointSet::build(points) }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_keys(&self) -> (usize, usize) {
        (self.prefixes.len(), self.suffixes.len())
    }

    /// Whether the grammar's fingerprint function separates all distinct keys
    /// of each key set.
    pub fn keys_collision_free(&self, dag: &SignatureDag) -> bool {
        let rp = ReversedPrefixes(dag);
        let sf = Suffixes(dag);
        // Retained keys are pairwise distinct strings, so any repeated
        // fingerprint within a set is a collision.
        collision_free_by(
            self.prefixes.keys().iter().enumerate().map(|(r, k)| (rp.key_prefix_fp(k, rp.key_len(k)), r)),
            |a, b| a == b,
        ) && collision_free_by(
            self.suffixes.keys().iter().enumerate().map(|(r, k)| (sf.key_prefix_fp(k, sf.key_len(k)), r)),
            |a, b| a == b,
        )
    }

    /// All 1-based occurrences of `pattern` (`m ≥ 2`), sorted.
    pub fn query(
        &self,
        dag: &SignatureDag,
        pattern: &[u8],
        options: LongQueryOptions,
        stats: &mut LongStats,
    ) -> Result<Vec<usize>> {
        let m = pattern.len();
        if m < 2 {
            return Err(Error::PatternLength { len: m, min: 2, max: usize::MAX });
        }
        let splits = match options.splits {
            SplitStrategy::Sparse => split_points(&dag.parse_pattern(pattern))?,
            SplitStrategy::All => (1..m).collect(),
        };
        let hash = dag.fingerprint_fn();
        let reversed: Vec<u8> = pattern.iter().rev().copied().collect();
        let fwd = PrefixFingerprints::new(pattern, hash);
        let rev = PrefixFingerprints::new(&reversed, hash);
        let (rp, sf) = (ReversedPrefixes(dag), Suffixes(dag));
        let whole = fwd.get(1, m);

        let mut candidates: FxHashSet<(Label, u64)> = FxHashSet::default();
        let mut order = Vec::new();
        for &p in &splits {
            stats.splits += 1;
            let left = Needle::new(&reversed, &rev, m - p);
            let right = Needle::new(pattern, &fwd, p);
            stats.prefix_searches += 1;
            let Some(xr) = self.search(&self.prefixes, &rp, left, p, options.trusted) else { continue };
            stats.prefix_searches += 1;
            let Some(yr) = self.search(&self.suffixes, &sf, right, m - p, options.trusted) else { continue };
            self.points.report_into(
                xr.start as u64,
                xr.end as u64 - 1,
                yr.start as u64,
                yr.end as u64 - 1,
                &mut |a: Anchor| {
                    let len = dag.node(a.node).len;
                    if a.pre_len >= p as u64 && a.pre_len - p as u64 + m as u64 <= len {
                        let o = a.pre_len - p as u64;
                        if candidates.insert((a.node, o)) {
                            order.push((a.node, o));
                        }
                    }
                },
            );
        }
        stats.candidates += order.len();

        let mut seen: FxHashSet<(Label, u64)> = FxHashSet::default();
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for (v, o) in order {
            if dag.range_fp_raw(v, o, o + m as u64) != whole || dag.common_prefix_raw(v, o, pattern) != m {
                continue;
            }
            stats.verified += 1;
            // Inside a run, the match repeats at every shift by the period.
            let mut shifts = vec![o];
            if let NodeKind::Run { child, .. } = dag.node(v).kind {
                let period = dag.node(child).len;
                let len = dag.node(v).len;
                let mut q = o + period;
                while q + m as u64 <= len {
                    shifts.push(q);
                    q += period;
                }
            }
            for q in shifts {
                if seen.insert((v, q)) {
                    stack.push((v, q));
                }
            }
            ascend(dag, &mut stack, &mut seen, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn search<T: KeyText<Key = Anchor>>(
        &self,
        set: &WeakPrefixSet<Anchor>,
        text: &T,
        needle: Needle<'_>,
        len: usize,
        trusted: bool,
    ) -> Option<std::ops::Range<usize>> {
        if !trusted {
            return set.query_exact(text, needle, len);
        }
        let range = set.query(text, needle, len)?;
        // Cheap rejection of ranges returned for needles that prefix no key.
        let fp = needle.prefix_fp(len);
        let ok = |k: &Anchor| text.key_len(k) >= len && text.key_prefix_fp(k, len) == fp;
        (ok(set.key(range.start)) && ok(set.key(range.end - 1))).then_some(range)
    }

    /// Only the two ranks of each anchor are stored; the anchors themselves
    /// are regenerated from the grammar on load.
    pub(crate) fn encode(&self, w: &mut Writer, dag: &SignatureDag) {
        let ranks: FxHashMap<Anchor, (u64, u64)> = self.points.points().into_iter().map(|(x, y, a)| (a, (x, y))).collect();
        let anchors = anchors(dag);
        w.var(anchors.len() as u64);
        for a in &anchors {
            let (x, y) = ranks[a];
            w.var(x);
            w.var(y);
        }
    }

    pub(crate) fn decode(r: &mut Reader<'_>, dag: &SignatureDag) -> Result<Self> {
        let anchors = anchors(dag);
        let count = r.var_len()?;
        if count != anchors.len() {
            return Err(Error::Format(format!("{count} anchors stored but the grammar has {}", anchors.len())));
        }
        let mut points = Vec::with_capacity(count);
        for &a in &anchors {
            points.push((r.var()?, r.var()?, a));
        }
        // The representative of a rank is its first anchor in node order,
        // as chosen by `WeakPrefixSet::build`.
        let keys = |rank: &dyn Fn(&(u64, u64, Anchor)) -> u64| -> Result<Vec<Anchor>> {
            let mut slots: Vec<Option<Anchor>> = vec![None; count];
            for p in &points {
                let slot = slots.get_mut(rank(p) as usize).ok_or_else(|| Error::Format("anchor rank out of range".into()))?;
                slot.get_or_insert(p.2);
            }
            let len = slots.iter().position(Option::is_none).unwrap_or(count);
            if slots[len..].iter().any(Option::is_some) {
                return Err(Error::Format("anchor ranks are not dense".into()));
            }
            Ok(slots.into_iter().take(len).map(Option::unwrap).collect())
        };
        let prefixes = WeakPrefixSet::from_sorted(keys(&|p| p.0)?);
        let suffixes = WeakPrefixSet::from_sorted(keys(&|p| p.1)?);
        Ok(Self { prefixes, suffixes, points: RangePointSet::build(points) })
    }

    pub fn size_bytes(&self) -> usize {
        (self.prefixes.len() + self.suffixes.len()) * std::mem::size_of::<Anchor>() + self.points.size_bytes()
    }
}

/// Pushes every `(node, offset)` on `stack` up through the reverse edges and
/// records an occurrence for each state that reaches the root.
fn ascend(dag: &SignatureDag, stack: &mut Vec<(Label, u64)>, seen: &mut FxHashSet<(Label, u64)>, out: &mut Vec<usize>) {
    let root = dag.root();
    while let Some((u, off)) = stack.pop() {
        if u == root {
            out.push(off as usize + 1);
            continue;
        }
        for &(p, t) in dag.parents(u) {
            match dag.node(p).kind {
                NodeKind::Run { count, .. } => {
                    let len = dag.node(u).len;
                    for j in 0..count {
                        if seen.insert((p, j * len + off)) {
                            stack.push((p, j * len + off));
                        }
                    }
                }
                _ => {
                    let base = if t == 0 { 0 } else { dag.child_prefix_lens(p)[t as usize - 1] };
                    if seen.insert((p, base + off)) {
                        stack.push((p, base + off));
                    }
                }
            }
        }
    }
}
