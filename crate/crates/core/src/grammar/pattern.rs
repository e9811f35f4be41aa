//! Query-side signature parse of a pattern, sharing the grammar's naming.

use rustc_hash::FxHashMap;

use super::{signature_rounds, Label, Namer, SignatureDag, CONSISTENCY_MARGIN};

/// One level of `sig(P)`: node labels and their 0-based start offsets in `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternLevel {
    pub labels: Vec<Label>,
    pub starts: Vec<usize>,
}

impl PatternLevel {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Whether node `idx` is within [`CONSISTENCY_MARGIN`] of either end of
    /// the level, where labels may differ between occurrences of the pattern.
    pub fn is_inconsistent(&self, idx: usize) -> bool {
        idx < CONSISTENCY_MARGIN || idx + CONSISTENCY_MARGIN >= self.labels.len()
    }
}

#[derive(Debug, Clone)]
pub struct PatternParse {
    m: usize,
    first_temporary: Label,
    levels: Vec<PatternLevel>,
}

impl PatternParse {
    pub fn pattern_len(&self) -> usize {
        self.m
    }

    /// Levels bottom-up, starting with the symbol level; one entry per
    /// construction step that changed the sequence.
    pub fn levels(&self) -> &[PatternLevel] {
        &self.levels
    }

    /// Labels at or above this value exist only in this parse.
    pub fn is_temporary(&self, label: Label) -> bool {
        label >= self.first_temporary
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }
}

struct PatternNamer<'a> {
    dag: &'a SignatureDag,
    next: Label,
    terminals: FxHashMap<u8, Label>,
    runs: FxHashMap<(Label, u64), Label>,
    blocks: FxHashMap<Vec<Label>, Label>,
}

impl PatternNamer<'_> {
    fn fresh(&mut self) -> Label {
        let label = self.next;
        self.next += 1;
        label
    }
}

impl Namer for PatternNamer<'_> {
    fn terminal(&mut self, symbol: u8, _start: usize) -> Label {
        if let Some(label) = self.dag.lookup_terminal(symbol) {
            return label;
        }
        if let Some(&label) = self.terminals.get(&symbol) {
            return label;
        }
        let label = self.fresh();
        self.terminals.insert(symbol, label);
        label
    }

    fn run(&mut self, child: Label, count: u64, _start: usize) -> Label {
        if (child as usize) < self.dag.num_nodes() {
            if let Some(label) = self.dag.lookup_run(child, count) {
                return label;
            }
        }
        if let Some(&label) = self.runs.get(&(child, count)) {
            return label;
        }
        let label = self.fresh();
        self.runs.insert((child, count), label);
        label
    }

    fn block(&mut self, children: &[Label], _start: usize) -> Label {
        let limit = self.dag.num_nodes() as Label;
        if children.iter().all(|&c| c < limit) {
            if let Some(label) = self.dag.lookup_block(children) {
                return label;
            }
        }
        if let Some(&label) = self.blocks.get(children) {
            return label;
        }
        let label = self.fresh();
        self.blocks.insert(children.to_vec(), label);
        label
    }
}

impl SignatureDag {
    /// Builds `sig(P)` with this grammar's priorities and naming. Blocks that
    /// exist in the grammar keep their labels; new ones get temporary labels.
    pub fn parse_pattern(&self, pattern: &[u8]) -> PatternParse {
        assert!(!pattern.is_empty(), "empty pattern");
        let first_temporary = self.num_nodes() as Label;
        let mut namer = PatternNamer {
            dag: self,
            next: first_temporary,
            terminals: FxHashMap::default(),
            runs: FxHashMap::default(),
            blocks: FxHashMap::default(),
        };
        let mut levels = Vec::new();
        signature_rounds(pattern, self.seed, &mut namer, |labels, starts| {
            levels.push(PatternLevel { labels: labels.to_vec(), starts: starts.to_vec() });
        });
        PatternParse { m: pattern.len(), first_temporary, levels }
    }
}
