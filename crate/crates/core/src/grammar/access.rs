//! Random access into the grammar: child lookup, extraction and fingerprints
//! of prefixes, suffixes and arbitrary ranges of `str(v)`.
//!
//! Public methods take 1-based positions; the `*_raw` helpers use 0-based,
//! half-open ranges within `str(v)` and assume their arguments are in range.

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

use super::{Label, NodeKind, SignatureDag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChildHit {
    pub child: Label,
    /// 1-based index of the child (for run nodes, the repetition number).
    pub ordinal: u64,
    /// 1-based position within `str(child)`.
    pub offset: u64,
}

impl SignatureDag {
    fn check_node(&self, v: Label) -> Result<()> {
        if (v as usize) < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::Format(format!("unknown label {v}")))
        }
    }

    /// The child of `v` producing position `i` of `str(v)`.
    pub fn child_at(&self, v: Label, i: u64) -> Result<ChildHit> {
        self.check_node(v)?;
        let len = self.nodes[v as usize].len;
        if i == 0 || i > len {
            return Err(Error::OutOfRange { start: i as usize, end: i as usize, len: len as usize });
        }
        let (child, ordinal, offset) = self.child_at_raw(v, i - 1).ok_or(Error::OutOfRange {
            start: i as usize,
            end: i as usize,
            len: len as usize,
        })?;
        Ok(ChildHit { child, ordinal: ordinal + 1, offset: offset + 1 })
    }

    /// 0-based `(child, child index, offset in child)`; `None` for terminals.
    #[inline]
    pub(crate) fn child_at_raw(&self, v: Label, i: u64) -> Option<(Label, u64, u64)> {
        match self.nodes[v as usize].kind {
            NodeKind::Terminal(_) => None,
            NodeKind::Run { child, .. } => {
                let clen = self.nodes[child as usize].len;
                Some((child, i / clen, i % clen))
            }
            NodeKind::Block { first_edge, degree } => {
                let fe = first_edge as usize;
                let ends = &self.edge_ends[fe..fe + degree as usize];
                let t = ends.partition_point(|&e| e <= i);
                let before = if t == 0 { 0 } else { ends[t - 1] };
                Some((self.edges[fe + t], t as u64, i - before))
            }
        }
    }

    /// `S[i]`, 1-based.
    pub fn char_at(&self, i: usize) -> Result<u8> {
        crate::error::check_range(i, i, self.len())?;
        Ok(self.symbol_raw(self.root, i as u64 - 1))
    }

    /// Symbol at 0-based offset `i` of `str(v)`.
    pub(crate) fn symbol_raw(&self, mut v: Label, mut i: u64) -> u8 {
        loop {
            match self.nodes[v as usize].kind {
                NodeKind::Terminal(c) => return c,
                _ => {
                    let (c, _, off) = self.child_at_raw(v, i).unwrap();
                    v = c;
                    i = off;
                }
            }
        }
    }

    /// `S[i, j]`, 1-based and inclusive.
    pub fn extract(&self, i: usize, j: usize) -> Result<Vec<u8>> {
        crate::error::check_range(i, j, self.len())?;
        let mut out = Vec::with_capacity(j - i + 1);
        self.extract_raw(self.root, i as u64 - 1, j as u64, &mut out);
        Ok(out)
    }

    /// `str(v)[i, j]`, 1-based and inclusive.
    pub fn extract_node(&self, v: Label, i: u64, j: u64) -> Result<Vec<u8>> {
        self.check_node(v)?;
        let len = self.nodes[v as usize].len;
        crate::error::check_range(i as usize, j as usize, len as usize)?;
        let mut out = Vec::with_capacity((j - i + 1) as usize);
        self.extract_raw(v, i - 1, j, &mut out);
        Ok(out)
    }

    /// Appends `str(v)[a..b)` to `out`.
    pub(crate) fn extract_raw(&self, v: Label, a: u64, b: u64, out: &mut Vec<u8>) {
        if a >= b {
            return;
        }
        match self.nodes[v as usize].kind {
            NodeKind::Terminal(c) => out.push(c),
            NodeKind::Run { child, .. } => {
                let clen = self.nodes[child as usize].len;
                let mut k = a / clen;
                while k * clen < b {
                    let base = k * clen;
                    self.extract_raw(child, a.max(base) - base, b.min(base + clen) - base, out);
                    k += 1;
                }
            }
            NodeKind::Block { first_edge, degree } => {
                let fe = first_edge as usize;
                let ends = &self.edge_ends[fe..fe + degree as usize];
                let mut t = ends.partition_point(|&e| e <= a);
                while t < ends.len() {
                    let base = if t == 0 { 0 } else { ends[t - 1] };
                    if base >= b {
                        break;
                    }
                    self.extract_raw(self.edges[fe + t], a.max(base) - base, b.min(ends[t]) - base, out);
                    t += 1;
                }
            }
        }
    }

    /// Compares `str(v)[a..a+len)` with `pat` symbol by symbol, stopping at
    /// the first mismatch. Returns the length of the common prefix.
    pub(crate) fn common_prefix_raw(&self, v: Label, a: u64, pat: &[u8]) -> usize {
        // Extraction in bounded chunks keeps the early exit cheap.
        let mut done = 0usize;
        let mut chunk = 16usize;
        let mut buf = Vec::new();
        while done < pat.len() {
            let take = chunk.min(pat.len() - done);
            buf.clear();
            self.extract_raw(v, a + done as u64, a + (done + take) as u64, &mut buf);
            if let Some(k) = buf.iter().zip(&pat[done..done + take]).position(|(x, y)| x != y) {
                return done + k;
            }
            done += take;
            chunk *= 2;
        }
        pat.len()
    }

    /// `φ(str(v)[1, l])`.
    pub fn prefix_fp(&self, v: Label, l: u64) -> Result<Fingerprint> {
        self.check_len(v, l)?;
        Ok(self.prefix_fp_raw(v, l))
    }

    /// `φ` of the last `l` symbols of `str(v)`.
    pub fn suffix_fp(&self, v: Label, l: u64) -> Result<Fingerprint> {
        self.check_len(v, l)?;
        let len = self.nodes[v as usize].len;
        Ok(self.range_fp_raw(v, len - l, len))
    }

    /// `ψ(str(v)[1, l])`, the fingerprint of the reversed prefix.
    pub fn prefix_rfp(&self, v: Label, l: u64) -> Result<Fingerprint> {
        self.check_len(v, l)?;
        Ok(self.prefix_rfp_raw(v, l))
    }

    fn check_len(&self, v: Label, l: u64) -> Result<()> {
        self.check_node(v)?;
        let len = self.nodes[v as usize].len;
        if l > len {
            return Err(Error::OutOfRange { start: 1, end: l as usize, len: len as usize });
        }
        Ok(())
    }

    pub(crate) fn prefix_fp_raw(&self, mut v: Label, mut l: u64) -> Fingerprint {
        let h = &self.hash;
        let mut acc = 0;
        while l > 0 {
            let node = self.nodes[v as usize];
            if l == node.len {
                return h.concat(acc, self.fp[v as usize], l);
            }
            match node.kind {
                NodeKind::Terminal(_) => unreachable!("partial terminal"),
                NodeKind::Run { child, .. } => {
                    let clen = self.nodes[child as usize].len;
                    let q = l / clen;
                    if q > 0 {
                        acc = h.concat(acc, h.repeat(self.fp[child as usize], clen, q), q * clen);
                    }
                    v = child;
                    l %= clen;
                }
                NodeKind::Block { first_edge, degree } => {
                    let fe = first_edge as usize;
                    let ends = &self.edge_ends[fe..fe + degree as usize];
                    let t = ends.partition_point(|&e| e <= l);
                    if t > 0 {
                        acc = h.concat(acc, self.edge_fp[fe + t - 1], ends[t - 1]);
                        l -= ends[t - 1];
                    }
                    v = self.edges[fe + t];
                }
            }
        }
        acc
    }

    pub(crate) fn prefix_rfp_raw(&self, mut v: Label, mut l: u64) -> Fingerprint {
        let h = &self.hash;
        let (mut acc, mut acc_len) = (0, 0);
        while l > 0 {
            let node = self.nodes[v as usize];
            if l == node.len {
                return h.concat_rev(acc, acc_len, self.rfp[v as usize]);
            }
            match node.kind {
                NodeKind::Terminal(_) => unreachable!("partial terminal"),
                NodeKind::Run { child, .. } => {
                    let clen = self.nodes[child as usize].len;
                    let q = l / clen;
                    if q > 0 {
                        acc = h.concat_rev(acc, acc_len, h.repeat_rev(self.rfp[child as usize], clen, q));
                        acc_len += q * clen;
                    }
                    v = child;
                    l %= clen;
                }
                NodeKind::Block { first_edge, degree } => {
                    let fe = first_edge as usize;
                    let ends = &self.edge_ends[fe..fe + degree as usize];
                    let t = ends.partition_point(|&e| e <= l);
                    if t > 0 {
                        acc = h.concat_rev(acc, acc_len, self.edge_rfp[fe + t - 1]);
                        acc_len += ends[t - 1];
                        l -= ends[t - 1];
                    }
                    v = self.edges[fe + t];
                }
            }
        }
        acc
    }

    /// `φ(str(v)[a..b))`.
    pub(crate) fn range_fp_raw(&self, v: Label, a: u64, b: u64) -> Fingerprint {
        let h = &self.hash;
        let whole = self.prefix_fp_raw(v, b);
        if a == 0 {
            return whole;
        }
        let head = self.prefix_fp_raw(v, a);
        crate::fingerprint::sub_mod(whole, crate::fingerprint::mul_mod(head, h.pow(b - a)))
    }

    /// `ψ(str(v)[a..b))`, i.e. `φ` of the reversed range.
    pub(crate) fn range_rfp_raw(&self, v: Label, a: u64, b: u64) -> Fingerprint {
        let h = &self.hash;
        let whole = self.prefix_rfp_raw(v, b);
        if a == 0 {
            return whole;
        }
        let head = self.prefix_rfp_raw(v, a);
        crate::fingerprint::mul_mod(crate::fingerprint::sub_mod(whole, head), h.inv_pow(a))
    }
}
