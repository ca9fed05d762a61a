//! Brute-force references and a structural checker for built trees.

pub mod properties;

use std::collections::BTreeMap;
use std::fmt;

use crate::engine::{Match, MismatchIndex};
use crate::fninv::Evaluator;
use crate::lcp::QueryContext;
use crate::text::{ceil_log2, hamming_naive, PaddedText, Symbol};
use crate::tree::{CglTree, Node, PathLabel, Slot, NONE};

/// Every text position whose suffix is within distance `r` of `q`, by a full scan.
pub fn brute_force_query(text: &PaddedText, q: &[Symbol], r: usize) -> Vec<Match> {
    (0..text.n())
        .filter_map(|i| {
            let d = hamming_naive(q, text.suffix(i));
            (d <= r).then_some(Match { position: i + 1, distance: d })
        })
        .collect()
}

/// Mismatch positions over the common length, collected one by one.
pub fn mismatch_positions(a: &[Symbol], b: &[Symbol]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    let end = a.len().min(b.len());
    while i < end {
        if a[i] != b[i] {
            out.push(i);
        }
        i += 1;
    }
    out
}

/// `{i in [0, n) : f(i) = j}`.
pub fn brute_force_preimage(f: &impl Evaluator, n: u32, j: u32) -> Vec<u32> {
    (0..n).filter(|&i| f.eval(i) == Some(j)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Halving,
    AlteredWithoutBudget,
    BudgetMismatch,
    TooManyAlterations,
    Depth,
    LabelsNotPrefixFree,
    LeafTooLarge,
    InternalTooSmall,
    SizeMismatch,
    Classification,
    PreimageTooLarge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: Option<u32>,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "node {n}: {:?}: {}", self.kind, self.detail),
            None => write!(f, "{:?}: {}", self.kind, self.detail),
        }
    }
}

/// Checks the structural rules of a built tree. `members` (leaf contents by
/// leaf order) enables the membership checks on truncated trees.
pub fn walk_invariants(tree: &CglTree, members: Option<&[Vec<u32>]>, ctx: &QueryContext<'_>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |node: Option<u32>, kind, detail: String| out.push(Violation { node, kind, detail });
    if tree.is_empty() {
        return out;
    }
    let labels = tree.path_labels();
    let k = tree.k();
    let height_bound = ceil_log2(tree.n());
    // (base, label) pairs of pivots and leaf members.
    let mut owned: Vec<(u32, PathLabel, u32)> = Vec::new();
    let mut leaf_ord = 0usize;
    for (id, node) in tree.nodes().iter().enumerate() {
        let id32 = id as u32;
        let label = labels[id];
        if label.altered_count() as usize > k {
            bad(Some(id32), ViolationKind::TooManyAlterations, format!("label {label}"));
        }
        if label.len() > height_bound {
            bad(Some(id32), ViolationKind::Depth, format!("depth {} > {height_bound}", label.len()));
        }
        match node {
            Node::Leaf(l) => {
                if let Some(s) = tree.sigma() {
                    if l.size as usize > s {
                        bad(Some(id32), ViolationKind::LeafTooLarge, format!("size {} > sigma {s}", l.size));
                    }
                }
                if let Some(m) = members.and_then(|m| m.get(leaf_ord)) {
                    if m.len() != l.size as usize {
                        bad(Some(id32), ViolationKind::SizeMismatch, format!("{} members, size {}", m.len(), l.size));
                    }
                    owned.extend(m.iter().map(|&i| (i, label, id32)));
                }
                leaf_ord += 1;
            }
            Node::Pivot(p) => {
                owned.push((p.base, label, id32));
                if let Some(s) = tree.sigma() {
                    if p.size as usize <= s {
                        bad(Some(id32), ViolationKind::InternalTooSmall, format!("size {} <= sigma {s}", p.size));
                    }
                }
                if p.k_rem as usize + label.altered_count() as usize != k {
                    bad(
                        Some(id32),
                        ViolationKind::BudgetMismatch,
                        format!("k_rem {} with label {label}", p.k_rem),
                    );
                }
                let mut unaltered_total = 1u64;
                for slot in Slot::ALL {
                    let c = p.children[slot as usize];
                    if c == NONE {
                        continue;
                    }
                    let child = tree.node(c);
                    if child.size() > p.size / 2 {
                        bad(
                            Some(c),
                            ViolationKind::Halving,
                            format!("child size {} of parent size {}", child.size(), p.size),
                        );
                    }
                    if slot.is_altered() && p.k_rem == 0 {
                        bad(Some(id32), ViolationKind::AlteredWithoutBudget, format!("slot {slot:?} present"));
                    }
                    if !slot.is_altered() {
                        unaltered_total += child.size() as u64;
                        if let Node::Pivot(cp) = child {
                            let (tag, _) = tree.classify(tree.pivot(cp), p, ctx);
                            if tag.slot() != Some(slot) {
                                bad(
                                    Some(c),
                                    ViolationKind::Classification,
                                    format!("pivot classified {tag:?} but stored in {slot:?}"),
                                );
                            }
                        }
                    }
                }
                if unaltered_total != p.size as u64 {
                    bad(
                        Some(id32),
                        ViolationKind::SizeMismatch,
                        format!("size {} but pivot plus unaltered children hold {unaltered_total}", p.size),
                    );
                }
            }
        }
    }
    // Per position: no label may be a prefix of another.
    owned.sort_unstable_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.lex_cmp(b.1)));
    for w in owned.windows(2) {
        if w[0].0 == w[1].0 && w[0].1.is_prefix_of(w[1].1) {
            bad(
                Some(w[1].2),
                ViolationKind::LabelsNotPrefixFree,
                format!("position {}: {} is a prefix of {}", w[0].0, w[0].1, w[1].1),
            );
        }
    }
    out
}

/// [`walk_invariants`] on an index, plus an exhaustive check that every label
/// of every `f_lambda` has at most `sigma` preimages when `exhaustive_f` is set.
pub fn walk_index(index: &MismatchIndex, exhaustive_f: bool) -> Vec<Violation> {
    let ctx = index.text_context();
    let mut out = walk_invariants(index.tree(), index.trunc().audit(), &ctx);
    if exhaustive_f {
        let sigma = index.trunc().sigma();
        for &lambda in index.trunc().label_counts().keys() {
            let mut counts = BTreeMap::<u32, usize>::new();
            for i in 0..index.text().n() as u32 {
                if let Some(l) = index.trunc().eval_f(lambda, i, &ctx) {
                    *counts.entry(l).or_default() += 1;
                }
            }
            for (l, c) in counts {
                if c > sigma {
                    out.push(Violation {
                        node: None,
                        kind: ViolationKind::PreimageTooLarge,
                        detail: format!("f_{lambda} label {l} has {c} preimages > {sigma}"),
                    });
                }
            }
        }
    }
    out
}
