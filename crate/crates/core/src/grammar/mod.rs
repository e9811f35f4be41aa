//! Signature grammar: the merged DAG of the signature tree of a text.
//!
//! Construction alternates two steps over a sequence of labels, starting with
//! the text's symbols:
//!
//! 1. every maximal run `x^k` (k ≥ 2) becomes a *run node* labelled by `(x, k)`;
//! 2. the now run-free sequence is cut into blocks, one starting at the first
//!    position and one at every local minimum of a pseudorandom priority; each
//!    block of two or more elements becomes a *run-free node* labelled by its
//!    child sequence.
//!
//! until one element, the root, remains. Labels are content addressed, so
//! equal subtrees share a label and the tree collapses into a DAG, i.e. a
//! run-length grammar producing the text.

mod access;
mod pattern;

use std::ops::Range;

use rustc_hash::FxHashMap;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintFn};

pub use access::ChildHit;
pub use pattern::{PatternLevel, PatternParse};

pub type Label = u32;

/// Rebuild when run-free nodes average more children than this.
pub const MAX_MEAN_DEGREE: f64 = 3.5;
/// Construction attempts before a fat grammar is accepted anyway.
pub const MAX_BUILD_ATTEMPTS: u32 = 8;
/// Nodes at each end of a level of a substring's parse that may differ
/// between occurrences. Whether a block closes depends on the node after
/// it, so the last block of a level can extend one node further in one
/// occurrence than in another; together with runs absorbing a differing
/// boundary node this gives three, not two.
pub const CONSISTENCY_MARGIN: usize = 3;

/// Pseudorandom priority of `label`. The mix is a bijection of
/// `seed ^ label·φ64`, so distinct labels never tie under one seed.
#[inline]
pub fn priority(seed: u64, label: Label) -> u64 {
    let mut x = seed ^ (label as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed used for the `attempt`-th construction.
pub fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        seed
    } else {
        priority(seed ^ 0xA5A5_A5A5_A5A5_A5A5, attempt)
    }
}

/// Cuts a run-free label sequence into blocks: one starts at index 0 and one
/// at every interior strict local minimum of `(priority, label)`.
pub fn block_decomposition(labels: &[Label], priorities: &[u64]) -> Result<Vec<Range<usize>>> {
    assert_eq!(labels.len(), priorities.len());
    if let Some(i) = labels.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::NotRunFree(i + 1));
    }
    let key = |i: usize| (priorities[i], labels[i]);
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..labels.len().saturating_sub(1) {
        if key(i) < key(i - 1) && key(i) < key(i + 1) {
            blocks.push(start..i);
            start = i;
        }
    }
    if !labels.is_empty() {
        blocks.push(start..labels.len());
    }
    Ok(blocks)
}

/// Round in which a block with this child is formed: run children were made
/// earlier in the same round, everything else in a previous one.
fn block_level(child: &DagNode) -> u32 {
    match child.kind {
        NodeKind::Run { .. } => child.level,
        _ => child.level + 1,
    }
}

/// Assigns labels to the nodes created during construction.
pub(crate) trait Namer {
    fn terminal(&mut self, symbol: u8, start: usize) -> Label;
    fn run(&mut self, child: Label, count: u64, start: usize) -> Label;
    fn block(&mut self, children: &[Label], start: usize) -> Label;
}

/// Runs the construction rounds over `text`, reporting every distinct level
/// (labels and 0-based start offsets) to `observe`. Returns the root label.
pub(crate) fn signature_rounds<N: Namer>(
    text: &[u8],
    seed: u64,
    namer: &mut N,
    mut observe: impl FnMut(&[Label], &[usize]),
) -> Label {
    let mut labels: Vec<Label> = text.iter().enumerate().map(|(i, &c)| namer.terminal(c, i)).collect();
    let mut starts: Vec<usize> = (0..text.len()).collect();
    observe(&labels, &starts);
    let mut next_labels = Vec::with_capacity(labels.len());
    let mut next_starts = Vec::with_capacity(labels.len());
    while labels.len() > 1 {
        // Step 1: collapse maximal runs.
        next_labels.clear();
        next_starts.clear();
        let mut i = 0;
        while i < labels.len() {
            let mut j = i + 1;
            while j < labels.len() && labels[j] == labels[i] {
                j += 1;
            }
            let label = if j - i >= 2 { namer.run(labels[i], (j - i) as u64, starts[i]) } else { labels[i] };
            next_labels.push(label);
            next_starts.push(starts[i]);
            i = j;
        }
        if next_labels.len() != labels.len() {
            std::mem::swap(&mut labels, &mut next_labels);
            std::mem::swap(&mut starts, &mut next_starts);
            observe(&labels, &starts);
        }
        if labels.len() == 1 {
            break;
        }

        // Step 2: block decomposition at local minima.
        next_labels.clear();
        next_starts.clear();
        let prio = |i: usize| (priority(seed, labels[i]), labels[i]);
        let mut block_start = 0;
        let mut emit = |from: usize, to: usize, out_l: &mut Vec<Label>, out_s: &mut Vec<usize>| {
            let label = if to - from == 1 { labels[from] } else { namer.block(&labels[from..to], starts[from]) };
            out_l.push(label);
            out_s.push(starts[from]);
        };
        let mut prev = prio(0);
        let mut cur = prio(1);
        for i in 1..labels.len() - 1 {
            let next = prio(i + 1);
            if cur < prev && cur < next {
                emit(block_start, i, &mut next_labels, &mut next_starts);
                block_start = i;
            }
            prev = cur;
            cur = next;
        }
        emit(block_start, labels.len(), &mut next_labels, &mut next_starts);
        std::mem::swap(&mut labels, &mut next_labels);
        std::mem::swap(&mut starts, &mut next_starts);
        observe(&labels, &starts);
    }
    labels[0]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Terminal(u8),
    /// `count ≥ 2` repetitions of `child`; stored as a single edge.
    Run { child: Label, count: u64 },
    /// Two or more distinct-adjacent children, stored in the shared edge table.
    Block { first_edge: u32, degree: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DagNode {
    pub kind: NodeKind,
    /// `|str(v)|`.
    pub len: u64,
    /// Construction round that creates the node; terminals are 0. Run nodes
    /// and blocks formed in the same round share a level, so the root's level
    /// is the number of rounds. Every non-terminal has `len > 2^(level-1)`,
    /// and `len ≥ 2^level` unless it was the first element of its round.
    pub level: u32,
}

#[derive(Default, Clone)]
pub(crate) struct Naming {
    terminals: Vec<Option<Label>>,
    runs: FxHashMap<(Label, u64), Label>,
    blocks: FxHashMap<Box<[Label]>, Label>,
}

impl Naming {
    fn new() -> Self {
        Self { terminals: vec![None; 256], ..Default::default() }
    }
}

/// Node table, naming and reverse edges of a signature grammar, plus the
/// per-node fingerprints under one [`FingerprintFn`].
#[derive(Clone)]
pub struct SignatureDag {
    seed: u64,
    root: Label,
    nodes: Vec<DagNode>,
    edges: Vec<Label>,
    /// Cumulative `|str|` of a block's children, through the child at this edge.
    edge_ends: Vec<u64>,
    parent_offsets: Vec<u32>,
    parents: Vec<(Label, u32)>,
    naming: Naming,
    hash: FingerprintFn,
    fp: Vec<Fingerprint>,
    rfp: Vec<Fingerprint>,
    /// `φ` / `ψ` of a block's children through the child at this edge.
    edge_fp: Vec<Fingerprint>,
    edge_rfp: Vec<Fingerprint>,
}

/// A freshly built grammar plus one occurrence position (1-based) per node.
pub struct GrammarBuild {
    pub dag: SignatureDag,
    pub first_pos: Vec<usize>,
    pub attempts: u32,
}

struct DagBuilder {
    naming: Naming,
    nodes: Vec<DagNode>,
    edges: Vec<Label>,
    edge_ends: Vec<u64>,
    first_pos: Vec<usize>,
}

impl DagBuilder {
    fn push(&mut self, node: DagNode, start: usize) -> Label {
        let label = self.nodes.len() as Label;
        self.nodes.push(node);
        self.first_pos.push(start + 1);
        label
    }
}

impl Namer for DagBuilder {
    fn terminal(&mut self, symbol: u8, start: usize) -> Label {
        if let Some(label) = self.naming.terminals[symbol as usize] {
            return label;
        }
        let label = self.push(DagNode { kind: NodeKind::Terminal(symbol), len: 1, level: 0 }, start);
        self.naming.terminals[symbol as usize] = Some(label);
        label
    }

    fn run(&mut self, child: Label, count: u64, start: usize) -> Label {
        if let Some(&label) = self.naming.runs.get(&(child, count)) {
            return label;
        }
        let c = self.nodes[child as usize];
        let node = DagNode { kind: NodeKind::Run { child, count }, len: c.len * count, level: c.level + 1 };
        let label = self.push(node, start);
        self.naming.runs.insert((child, count), label);
        label
    }

    fn block(&mut self, children: &[Label], start: usize) -> Label {
        if let Some(&label) = self.naming.blocks.get(children) {
            return label;
        }
        let first_edge = self.edges.len() as u32;
        let mut len = 0;
        let mut level = 0;
        for &c in children {
            let child = self.nodes[c as usize];
            len += child.len;
            level = level.max(block_level(&child));
            self.edges.push(c);
            self.edge_ends.push(len);
        }
        let kind = NodeKind::Block { first_edge, degree: children.len() as u32 };
        let label = self.push(DagNode { kind, len, level }, start);
        self.naming.blocks.insert(children.into(), label);
        label
    }
}

impl SignatureDag {
    /// Builds the grammar of `text`, retrying with derived seeds while the
    /// mean run-free out-degree exceeds [`MAX_MEAN_DEGREE`].
    pub fn build(text: &[u8], seed: u64) -> Result<Self> {
        Ok(Self::build_traced(text, seed, FingerprintFn::from_seed(seed))?.dag)
    }

    pub fn build_traced(text: &[u8], seed: u64, hash: FingerprintFn) -> Result<GrammarBuild> {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        let mut attempt = 0;
        loop {
            let s = attempt_seed(seed, attempt);
            let (dag, first_pos) = Self::build_once(text, s, hash.clone());
            attempt += 1;
            if dag.mean_block_degree() <= MAX_MEAN_DEGREE || attempt >= MAX_BUILD_ATTEMPTS {
                return Ok(GrammarBuild { dag, first_pos, attempts: attempt });
            }
        }
    }

    fn build_once(text: &[u8], seed: u64, hash: FingerprintFn) -> (Self, Vec<usize>) {
        let mut builder = DagBuilder {
            naming: Naming::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
            edge_ends: Vec::new(),
            first_pos: Vec::new(),
        };
        let root = signature_rounds(text, seed, &mut builder, |_, _| {});
        let DagBuilder { naming, nodes, edges, edge_ends, first_pos } = builder;
        let dag = Self::assemble(seed, root, nodes, edges, edge_ends, naming, hash);
        (dag, first_pos)
    }

    fn assemble(
        seed: u64,
        root: Label,
        nodes: Vec<DagNode>,
        edges: Vec<Label>,
        edge_ends: Vec<u64>,
        naming: Naming,
        hash: FingerprintFn,
    ) -> Self {
        let mut dag = Self {
            seed,
            root,
            nodes,
            edges,
            edge_ends,
            parent_offsets: Vec::new(),
            parents: Vec::new(),
            naming,
            hash: hash.clone(),
            fp: Vec::new(),
            rfp: Vec::new(),
            edge_fp: Vec::new(),
            edge_rfp: Vec::new(),
        };
        dag.link_parents();
        dag.set_fingerprint_fn(hash);
        dag
    }

    fn link_parents(&mut self) {
        let mut counts = vec![0u32; self.nodes.len() + 1];
        for v in 0..self.nodes.len() {
            match self.nodes[v].kind {
                NodeKind::Terminal(_) => {}
                NodeKind::Run { child, .. } => counts[child as usize + 1] += 1,
                NodeKind::Block { first_edge, degree } => {
                    for &c in &self.edges[first_edge as usize..(first_edge + degree) as usize] {
                        counts[c as usize + 1] += 1;
                    }
                }
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut parents = vec![(0, 0); *counts.last().unwrap() as usize];
        for v in 0..self.nodes.len() {
            match self.nodes[v].kind {
                NodeKind::Terminal(_) => {}
                NodeKind::Run { child, .. } => {
                    parents[fill[child as usize] as usize] = (v as Label, 0);
                    fill[child as usize] += 1;
                }
                NodeKind::Block { first_edge, degree } => {
                    for t in 0..degree {
                        let c = self.edges[(first_edge + t) as usize] as usize;
                        parents[fill[c] as usize] = (v as Label, t);
                        fill[c] += 1;
                    }
                }
            }
        }
        self.parent_offsets = counts;
        self.parents = parents;
    }

    /// Recomputes every stored fingerprint under `hash`.
    pub fn set_fingerprint_fn(&mut self, hash: FingerprintFn) {
        let n = self.nodes.len();
        let mut fp = vec![0; n];
        let mut rfp = vec![0; n];
        let mut edge_fp = vec![0; self.edges.len()];
        let mut edge_rfp = vec![0; self.edges.len()];
        // Labels are created children-first, so label order is topological.
        for v in 0..n {
            let node = self.nodes[v];
            match node.kind {
                NodeKind::Terminal(c) => {
                    fp[v] = hash.code(c);
                    rfp[v] = hash.code(c);
                }
                NodeKind::Run { child, count } => {
                    let clen = self.nodes[child as usize].len;
                    fp[v] = hash.repeat(fp[child as usize], clen, count);
                    rfp[v] = hash.repeat_rev(rfp[child as usize], clen, count);
                }
                NodeKind::Block { first_edge, degree } => {
                    let (mut f, mut r, mut len) = (0, 0, 0);
                    for e in first_edge as usize..(first_edge + degree) as usize {
                        let c = self.edges[e] as usize;
                        let clen = self.nodes[c].len;
                        f = hash.concat(f, fp[c], clen);
                        r = hash.concat_rev(r, len, rfp[c]);
                        len += clen;
                        edge_fp[e] = f;
                        edge_rfp[e] = r;
                    }
                    fp[v] = f;
                    rfp[v] = r;
                }
            }
        }
        self.hash = hash;
        self.fp = fp;
        self.rfp = rfp;
        self.edge_fp = edge_fp;
        self.edge_rfp = edge_rfp;
    }

    pub fn fingerprint_fn(&self) -> &FingerprintFn {
        &self.hash
    }

    /// Seed of the priority function actually used (after any rebuilds).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn root(&self) -> Label {
        self.root
    }

    /// Length of the text.
    pub fn len(&self) -> usize {
        self.nodes[self.root as usize].len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of construction rounds, at most `⌈lg n⌉`.
    pub fn height(&self) -> u32 {
        self.nodes[self.root as usize].level
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Stored edges: one per run node plus the out-degree of each run-free node.
    pub fn num_edges(&self) -> usize {
        self.edges.len() + self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Run { .. })).count()
    }

    pub fn mean_block_degree(&self) -> f64 {
        let blocks = self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Block { .. })).count();
        if blocks == 0 {
            0.0
        } else {
            self.edges.len() as f64 / blocks as f64
        }
    }

    pub fn node(&self, label: Label) -> &DagNode {
        &self.nodes[label as usize]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (Label, &DagNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (i as Label, n))
    }

    /// Children of a run-free node (empty for terminals and run nodes).
    pub fn children(&self, label: Label) -> &[Label] {
        match self.nodes[label as usize].kind {
            NodeKind::Block { first_edge, degree } => &self.edges[first_edge as usize..(first_edge + degree) as usize],
            _ => &[],
        }
    }

    /// Cumulative `|str|` of a run-free node's children.
    pub fn child_prefix_lens(&self, label: Label) -> &[u64] {
        match self.nodes[label as usize].kind {
            NodeKind::Block { first_edge, degree } => {
                &self.edge_ends[first_edge as usize..(first_edge + degree) as usize]
            }
            _ => &[],
        }
    }

    /// `(parent, child index)` for every edge into `label`; run parents appear once.
    pub fn parents(&self, label: Label) -> &[(Label, u32)] {
        &self.parents[self.parent_offsets[label as usize] as usize..self.parent_offsets[label as usize + 1] as usize]
    }

    pub fn fingerprint(&self, label: Label) -> Fingerprint {
        self.fp[label as usize]
    }

    pub fn reverse_fingerprint(&self, label: Label) -> Fingerprint {
        self.rfp[label as usize]
    }

    pub fn lookup_terminal(&self, symbol: u8) -> Option<Label> {
        self.naming.terminals[symbol as usize]
    }

    pub fn lookup_run(&self, child: Label, count: u64) -> Option<Label> {
        self.naming.runs.get(&(child, count)).copied()
    }

    pub fn lookup_block(&self, children: &[Label]) -> Option<Label> {
        self.naming.blocks.get(children).copied()
    }

    /// Checks structural invariants; used by tests and after loading.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(format!("signature grammar: {msg}")));
        if self.root as usize >= self.nodes.len() {
            return bad("root out of range".into());
        }
        for (v, node) in self.nodes.iter().enumerate() {
            let (len, level) = match node.kind {
                NodeKind::Terminal(_) => (1, 0),
                NodeKind::Run { child, count } => {
                    if child as usize >= v || count < 2 {
                        return bad(format!("node {v}: bad run"));
                    }
                    let c = self.nodes[child as usize];
                    (c.len * count, c.level + 1)
                }
                NodeKind::Block { .. } => {
                    let kids = self.children(v as Label);
                    if kids.len() < 2 || kids.iter().any(|&c| c as usize >= v) {
                        return bad(format!("node {v}: bad block"));
                    }
                    if kids.windows(2).any(|w| w[0] == w[1]) {
                        return bad(format!("node {v}: adjacent equal children"));
                    }
                    let len = kids.iter().map(|&c| self.nodes[c as usize].len).sum();
                    let level = kids.iter().map(|&c| block_level(&self.nodes[c as usize])).max().unwrap();
                    (len, level)
                }
            };
            if node.len != len || node.level != level {
                return bad(format!("node {v}: inconsistent length or level"));
            }
            if node.level > 0 && node.level < 64 && node.len <= 1u64 << (node.level - 1) {
                return bad(format!("node {v}: too short for level {}", node.level));
            }
        }
        // Reverse edges must invert the child relation exactly.
        let mut forward = 0usize;
        for v in 0..self.nodes.len() as Label {
            match self.nodes[v as usize].kind {
                NodeKind::Terminal(_) => {}
                NodeKind::Run { child, .. } => {
                    forward += 1;
                    if !self.parents(child).contains(&(v, 0)) {
                        return bad(format!("missing reverse edge {child} -> {v}"));
                    }
                }
                NodeKind::Block { .. } => {
                    for (t, &c) in self.children(v).iter().enumerate() {
                        forward += 1;
                        if !self.parents(c).contains(&(v, t as u32)) {
                            return bad(format!("missing reverse edge {c} -> {v}"));
                        }
                    }
                }
            }
        }
        if forward != self.parents.len() {
            return bad("reverse edge count differs from forward edges".into());
        }
        Ok(())
    }

    pub(crate) fn encode(&self, w: &mut Writer) {
        w.u64(self.seed);
        w.u32(self.root);
        w.u64(self.nodes.len() as u64);
        // Children always precede their parent; storing the backward distance
        // keeps the varints short.
        for (v, node) in self.nodes.iter().enumerate() {
            let back = |c: Label| (v - c as usize) as u64;
            match node.kind {
                NodeKind::Terminal(c) => {
                    w.u8(0);
                    w.u8(c);
                }
                NodeKind::Run { child, count } => {
                    w.u8(1);
                    w.var(back(child));
                    w.var(count);
                }
                NodeKind::Block { first_edge, degree } => {
                    w.u8(2);
                    w.var(degree as u64);
                    for &c in &self.edges[first_edge as usize..(first_edge + degree) as usize] {
                        w.var(back(c));
                    }
                }
            }
        }
    }

    pub(crate) fn decode(r: &mut Reader<'_>, hash: FingerprintFn) -> Result<Self> {
        let seed = r.u64()?;
        let root = r.u32()?;
        let count = r.len()?;
        let mut builder = DagBuilder {
            naming: Naming::new(),
            nodes: Vec::with_capacity(count.min(r.remaining())),
            edges: Vec::new(),
            edge_ends: Vec::new(),
            first_pos: Vec::new(),
        };
        for v in 0..count {
            let expect = v as Label;
            let check = |label: Label| {
                if label == expect {
                    Ok(())
                } else {
                    Err(Error::Format(format!("node {v} is not in canonical order")))
                }
            };
            let child = |r: &mut Reader<'_>| -> Result<Label> {
                match r.var_len()? {
                    back @ 1.. if back <= v => Ok((v - back) as Label),
                    back => Err(Error::Format(format!("node {v}: child distance {back}"))),
                }
            };
            match r.u8()? {
                0 => check(builder.terminal(r.u8()?, 0))?,
                1 => {
                    let child = child(r)?;
                    let reps = r.var()?;
                    if reps < 2 {
                        return Err(Error::Format(format!("node {v}: run count {reps}")));
                    }
                    check(builder.run(child, reps, 0))?
                }
                2 => {
                    let degree = r.var_len()?;
                    if degree > r.remaining() {
                        return Err(Error::Format(format!("node {v}: degree {degree} exceeds input")));
                    }
                    let kids = (0..degree).map(|_| child(r)).collect::<Result<Vec<_>>>()?;
                    if kids.len() < 2 {
                        return Err(Error::Format(format!("node {v}: block with {} children", kids.len())));
                    }
                    check(builder.block(&kids, 0))?
                }
                tag => return Err(Error::Format(format!("unknown node tag {tag}"))),
            }
        }
        if root as usize >= count {
            return Err(Error::Format("root label out of range".into()));
        }
        let DagBuilder { naming, nodes, edges, edge_ends, .. } = builder;
        let dag = Self::assemble(seed, root, nodes, edges, edge_ends, naming, hash);
        dag.validate()?;
        Ok(dag)
    }
}
