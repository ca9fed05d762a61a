//! The sigma-truncated tree and the label functions `f_lambda`.
//!
//! `f_lambda(i)` is the label of the leaf with path label `lambda` that holds
//! suffix `i`, or `None`. It is evaluated by walking the tree from the root and
//! letting `lambda` decide, edge by edge, whether to stay unaltered or to
//! pivot-alter the carried suffix.

use std::collections::BTreeMap;

use crate::lcp::QueryContext;
use crate::text::{pivot_alter, AlteredString};
use crate::tree::{BuildOutput, CglTree, Node, PathLabel, NONE};

#[derive(Clone, Debug)]
pub struct TruncTree {
    tree: CglTree,
    sigma: usize,
    label_counts: BTreeMap<PathLabel, u32>,
    /// Leaf contents by leaf order; kept only for audit builds.
    audit: Option<Vec<Vec<u32>>>,
}

/// `f_lambda` for every realized `lambda`, tabulated over `[0, n)` with 0 for
/// "undefined".
pub type LabelTables = BTreeMap<PathLabel, Vec<u32>>;

/// Collects label counts and, from the membership recorded while building,
/// the tabulated label functions.
pub fn truncate_labels(out: BuildOutput, audit: bool) -> (TruncTree, LabelTables) {
    let BuildOutput { tree, leaf_members } = out;
    let sigma = tree.sigma().expect("tree must be built with a truncation threshold");
    let n = tree.n();
    let mut label_counts = BTreeMap::new();
    let mut tables: LabelTables = BTreeMap::new();
    let leaves = tree.nodes().iter().filter_map(|node| match node {
        Node::Leaf(l) => Some(l),
        Node::Pivot(_) => None,
    });
    for (leaf, members) in leaves.zip(&leaf_members) {
        let c = label_counts.entry(leaf.path).or_insert(0u32);
        *c = (*c).max(leaf.label);
        let table = tables.entry(leaf.path).or_insert_with(|| vec![0u32; n]);
        for &i in members {
            debug_assert_eq!(table[i as usize], 0, "suffix in two leaves with one path label");
            table[i as usize] = leaf.label;
        }
    }
    let t = TruncTree { tree, sigma, label_counts, audit: audit.then_some(leaf_members) };
    (t, tables)
}

impl TruncTree {
    /// Reassembles a truncated tree whose leaves already carry labels.
    pub fn from_tree(tree: CglTree) -> Self {
        let sigma = tree.sigma().expect("truncated tree");
        let mut label_counts = BTreeMap::new();
        for node in tree.nodes() {
            if let Node::Leaf(l) = node {
                let c = label_counts.entry(l.path).or_insert(0u32);
                *c = (*c).max(l.label);
            }
        }
        TruncTree { tree, sigma, label_counts, audit: None }
    }

    pub fn tree(&self) -> &CglTree {
        &self.tree
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Number of leaves per path label.
    pub fn label_counts(&self) -> &BTreeMap<PathLabel, u32> {
        &self.label_counts
    }

    pub fn audit(&self) -> Option<&[Vec<u32>]> {
        self.audit.as_deref()
    }

    /// `f_lambda(i)` by label-guided traversal; `i` is a 0-based text position.
    pub fn eval_f(&self, lambda: PathLabel, i: u32, ctx: &QueryContext<'_>) -> Option<u32> {
        let tree = &self.tree;
        let src = ctx.sources();
        let mut s = AlteredString::text_suffix(i as usize);
        let mut node = tree.root();
        let mut depth = 0usize;
        loop {
            let p = match tree.node(node) {
                Node::Leaf(l) => return (depth == lambda.len()).then_some(l.label),
                Node::Pivot(p) => p,
            };
            if depth == lambda.len() {
                return None;
            }
            let (tag, lcp) = tree.classify(s.as_ref(), p, ctx);
            let slot = tag.slot()?;
            let next = if lambda.is_altered_at(depth) {
                let alt = slot.altered()?;
                s = pivot_alter(s.as_ref(), lcp, tree.pivot(p), &src).ok()?;
                p.children[alt as usize]
            } else {
                p.children[slot as usize]
            };
            if next == NONE {
                return None;
            }
            node = next;
            depth += 1;
        }
    }
}
