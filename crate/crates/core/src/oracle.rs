//! Brute-force reference implementations for tests and self-checks.
//!
//! Nothing here is used by the index itself. Each function is written
//! directly from the definition and is only fast enough for small inputs.

use std::collections::HashMap;

use crate::grammar::{priority, Label};

/// Largest text the quadratic oracles are meant for.
pub const SCAN_LIMIT: usize = 100_000;
/// Largest text for which an explicit signature tree is built in tests.
pub const TREE_LIMIT: usize = 500;

/// Every 1-based `p` with `S[p, p+m-1] = P`, in increasing order.
pub fn naive_search(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    assert!(!pattern.is_empty(), "empty pattern");
    if pattern.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pattern.len())
        .filter(|&p| &text[p..p + pattern.len()] == pattern)
        .map(|p| p + 1)
        .collect()
}

/// Greedy LZ77 by trying every earlier source. Returns `(source, length,
/// literal)` per phrase with 1-based sources (0 when nothing is copied).
pub fn naive_lz77(text: &[u8]) -> Vec<(usize, usize, Option<u8>)> {
    let n = text.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut best_len, mut best_src) = (0, 0);
        for s in 0..i {
            let mut l = 0;
            while i + l < n && text[s + l] == text[i + l] {
                l += 1;
            }
            if l > best_len {
                best_len = l;
                best_src = s + 1;
            }
        }
        let literal = text.get(i + best_len).copied();
        out.push((if best_len == 0 { 0 } else { best_src }, best_len, literal));
        i += best_len + 1;
    }
    out
}

/// Payloads of all points inside the closed rectangle, in input order.
pub fn linear_range_filter<T: Copy>(points: &[(u64, u64, T)], x: (u64, u64), y: (u64, u64)) -> Vec<T> {
    points
        .iter()
        .filter(|&&(px, py, _)| x.0 <= px && px <= x.1 && y.0 <= py && py <= y.1)
        .map(|&(_, _, t)| t)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Label,
    /// 0-based half-open range of leaves below this node.
    pub start: usize,
    pub end: usize,
}

/// `sig(S)` as an explicit tree, one node sequence per construction step.
///
/// Labels are assigned in creation order by the same content rules as the
/// grammar, so for a grammar built in one attempt the labels coincide.
#[derive(Debug, Clone)]
pub struct ExplicitSigTree {
    pub levels: Vec<Vec<TreeNode>>,
}

#[derive(Hash, PartialEq, Eq)]
enum Content {
    Leaf(u8),
    Run(Label, usize),
    Block(Vec<Label>),
}

impl ExplicitSigTree {
    pub fn build(text: &[u8], seed: u64) -> Self {
        assert!(!text.is_empty(), "empty text");
        let mut names: HashMap<Content, Label> = HashMap::new();
        let mut name = |c: Content| {
            let next = names.len() as Label;
            *names.entry(c).or_insert(next)
        };
        let mut level: Vec<TreeNode> = text
            .iter()
            .enumerate()
            .map(|(i, &c)| TreeNode { label: name(Content::Leaf(c)), start: i, end: i + 1 })
            .collect();
        let mut levels = vec![level.clone()];
        while level.len() > 1 {
            // Runs.
            let mut runs = Vec::new();
            let mut i = 0;
            while i < level.len() {
                let mut j = i;
                while j < level.len() && level[j].label == level[i].label {
                    j += 1;
                }
                let label = if j - i > 1 { name(Content::Run(level[i].label, j - i)) } else { level[i].label };
                runs.push(TreeNode { label, start: level[i].start, end: level[j - 1].end });
                i = j;
            }
            if runs.len() < level.len() {
                levels.push(runs.clone());
            }
            level = runs;
            if level.len() == 1 {
                break;
            }
            // Blocks at strict local minima of (priority, label).
            let key = |t: &TreeNode| (priority(seed, t.label), t.label);
            let mut cuts = vec![0];
            for i in 1..level.len() - 1 {
                if key(&level[i]) < key(&level[i - 1]) && key(&level[i]) < key(&level[i + 1]) {
                    cuts.push(i);
                }
            }
            cuts.push(level.len());
            let mut blocks = Vec::new();
            for w in cuts.windows(2) {
                let part = &level[w[0]..w[1]];
                let label = if part.len() == 1 {
                    part[0].label
                } else {
                    name(Content::Block(part.iter().map(|t| t.label).collect()))
                };
                blocks.push(TreeNode { label, start: part[0].start, end: part[part.len() - 1].end });
            }
            levels.push(blocks.clone());
            level = blocks;
        }
        Self { levels }
    }

    pub fn root(&self) -> &TreeNode {
        &self.levels.last().unwrap()[0]
    }

    /// Per level, the nodes whose leaf range meets `S[i, j]` (1-based, inclusive).
    pub fn relevant(&self, i: usize, j: usize) -> Vec<Vec<TreeNode>> {
        self.levels
            .iter()
            .map(|level| level.iter().filter(|t| t.start < j && t.end >= i).cloned().collect())
            .collect()
    }
}
