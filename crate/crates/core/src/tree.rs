//! The recursive CGL tree.
//!
//! Every node holds a set `S` of altered text suffixes (implicitly), a pivot
//! `p` of lexicographic rank `ceil(|S|/2)` and the lower median `m` of
//! `LCP(s, p)` over `S \ {p}`. The rest of `S` is split four ways by comparing
//! `LCP(s, p)` with `m` and, on ties, by the side of `p`; the first three parts
//! also get pivot-altered copies. Seven child slots in total.
//!
//! With a truncation threshold `sigma`, a set of at most `sigma` elements
//! becomes a leaf that carries only an integer label.

use std::cmp::Ordering;

use smallvec::SmallVec;

use crate::error::QueryError;
use crate::lcp::QueryContext;
use crate::text::{pivot_alter, AlteredRef, AlteredString, Alteration, Base};

pub const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    LessM = 0,
    LessL = 1,
    GreaterL = 2,
    GreaterM = 3,
    AltLessM = 4,
    AltLessL = 5,
    AltGreaterL = 6,
}

impl Slot {
    pub const ALL: [Slot; 7] = [
        Slot::LessM,
        Slot::LessL,
        Slot::GreaterL,
        Slot::GreaterM,
        Slot::AltLessM,
        Slot::AltLessL,
        Slot::AltGreaterL,
    ];
    pub const UNALTERED: [Slot; 4] = [Slot::LessM, Slot::LessL, Slot::GreaterL, Slot::GreaterM];

    pub fn is_altered(self) -> bool {
        self as usize >= 4
    }

    pub fn from_index(i: usize) -> Slot {
        Slot::ALL[i]
    }

    /// Altered counterpart of an unaltered slot; `None` for `GreaterM`.
    pub fn altered(self) -> Option<Slot> {
        match self {
            Slot::LessM => Some(Slot::AltLessM),
            Slot::LessL => Some(Slot::AltLessL),
            Slot::GreaterL => Some(Slot::AltGreaterL),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubsetTag {
    LessM,
    LessL,
    GreaterL,
    GreaterM,
    IsPivot,
}

impl SubsetTag {
    pub fn slot(self) -> Option<Slot> {
        match self {
            SubsetTag::LessM => Some(Slot::LessM),
            SubsetTag::LessL => Some(Slot::LessL),
            SubsetTag::GreaterL => Some(Slot::GreaterL),
            SubsetTag::GreaterM => Some(Slot::GreaterM),
            SubsetTag::IsPivot => None,
        }
    }
}

/// Root-to-node edge tags; bit `j` set means edge `j` entered an altered subset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathLabel {
    pub bits: u64,
    pub len: u8,
}

impl PathLabel {
    pub const EMPTY: PathLabel = PathLabel { bits: 0, len: 0 };

    pub fn push(self, altered: bool) -> PathLabel {
        assert!(self.len < 64, "path label overflow");
        PathLabel { bits: self.bits | ((altered as u64) << self.len), len: self.len + 1 }
    }

    pub fn is_altered_at(self, j: usize) -> bool {
        (self.bits >> j) & 1 == 1
    }

    pub fn altered_count(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn is_prefix_of(self, other: PathLabel) -> bool {
        if self.len > other.len {
            return false;
        }
        let mask = if self.len == 64 { u64::MAX } else { (1u64 << self.len) - 1 };
        other.bits & mask == self.bits
    }

    /// Order of the `a`/`u` strings, so that a label sorts right before the
    /// labels it is a prefix of.
    pub fn lex_cmp(self, other: PathLabel) -> Ordering {
        let common = self.len.min(other.len) as usize;
        let mask = if common == 64 { u64::MAX } else { (1u64 << common) - 1 };
        let diff = (self.bits ^ other.bits) & mask;
        if diff == 0 {
            return self.len.cmp(&other.len);
        }
        let j = diff.trailing_zeros() as usize;
        // 'a' (altered) sorts before 'u'.
        if self.is_altered_at(j) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn parse(s: &str) -> Option<PathLabel> {
        s.chars().try_fold(PathLabel::EMPTY, |acc, c| match c {
            'u' => Some(acc.push(false)),
            'a' => Some(acc.push(true)),
            _ => None,
        })
    }
}

impl std::fmt::Display for PathLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len == 0 {
            return f.write_str("ε");
        }
        for j in 0..self.len() {
            f.write_str(if self.is_altered_at(j) { "a" } else { "u" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotNode {
    /// Text position of the pivot's base suffix (0-based).
    pub base: u32,
    pub alt_start: u32,
    pub alt_len: u8,
    pub m: u32,
    pub k_rem: u8,
    pub size: u32,
    pub children: [u32; 7],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafNode {
    /// Label among leaves sharing `path`, starting at 1.
    pub label: u32,
    pub size: u32,
    pub path: PathLabel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Pivot(PivotNode),
    Leaf(LeafNode),
}

impl Node {
    pub fn size(&self) -> u32 {
        match self {
            Node::Pivot(p) => p.size,
            Node::Leaf(l) => l.size,
        }
    }
}

/// Nodes live in one arena in preorder; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CglTree {
    nodes: Vec<Node>,
    alts: Vec<Alteration>,
    n: usize,
    k: usize,
    sigma: Option<usize>,
}

/// Result of splitting one set around its pivot.
#[derive(Clone, Debug)]
pub struct Partition {
    pub pivot: AlteredString,
    pub m: usize,
    pub subsets: [Vec<AlteredString>; 7],
}

/// Splits `set` (non-empty) around its pivot. Altered subsets are only built
/// when `k_rem > 0`. Elements whose LCP with the pivot covers a whole string
/// cannot be pivot-altered and are left out of the altered subsets.
pub fn partition(mut set: Vec<AlteredString>, k_rem: usize, ctx: &QueryContext<'_>) -> Partition {
    assert!(!set.is_empty());
    let rank = set.len().div_ceil(2) - 1;
    set.select_nth_unstable_by(rank, |a, b| ctx.compare(a.as_ref(), b.as_ref()).0);
    let pivot = set.swap_remove(rank);
    let mut with_lcp: Vec<(AlteredString, usize, Ordering)> = set
        .into_iter()
        .map(|s| {
            let (ord, lcp) = ctx.compare(s.as_ref(), pivot.as_ref());
            (s, lcp, ord)
        })
        .collect();
    let m = if with_lcp.is_empty() {
        0
    } else {
        let mut lcps: Vec<usize> = with_lcp.iter().map(|e| e.1).collect();
        let mid = (lcps.len() - 1) / 2;
        *lcps.select_nth_unstable(mid).1
    };
    let src = ctx.sources();
    let mut subsets: [Vec<AlteredString>; 7] = Default::default();
    for (s, lcp, ord) in with_lcp.drain(..) {
        let slot = match lcp.cmp(&m) {
            Ordering::Less => Slot::LessM,
            Ordering::Greater => Slot::GreaterM,
            Ordering::Equal if ord == Ordering::Less => Slot::LessL,
            Ordering::Equal => Slot::GreaterL,
        };
        if k_rem > 0 {
            if let Some(alt) = slot.altered() {
                if let Ok(hat) = pivot_alter(s.as_ref(), lcp, pivot.as_ref(), &src) {
                    subsets[alt as usize].push(hat);
                }
            }
        }
        subsets[slot as usize].push(s);
    }
    Partition { pivot, m, subsets }
}

/// Leaf membership recorded while building, indexed by leaf order.
#[derive(Clone, Debug, Default)]
pub struct BuildOutput {
    pub tree: CglTree,
    /// For each truncated leaf, in preorder, the text positions it contains.
    pub leaf_members: Vec<Vec<u32>>,
}

impl Default for CglTree {
    fn default() -> Self {
        CglTree { nodes: Vec::new(), alts: Vec::new(), n: 0, k: 0, sigma: None }
    }
}

struct Pending {
    set: Vec<AlteredString>,
    k_rem: usize,
    path: PathLabel,
    parent: u32,
    slot: Slot,
}

/// How a manual traversal ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraversalEnd {
    /// Reached a node with no pivot (a truncated leaf).
    Leaf,
    /// The walked string equals the pivot of the last node.
    IsPivot,
    /// The walked string belongs in a child slot that is empty.
    EmptySlot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Traversal {
    pub path: Vec<u32>,
    pub end: TraversalEnd,
}

impl Traversal {
    pub fn destination(&self) -> u32 {
        *self.path.last().unwrap()
    }
}

/// Counters gathered during one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// All node visits outside DFS.
    pub visited: u64,
    /// Visits outside DFS with remaining radius above zero.
    pub visited_positive: u64,
    /// Node visits made by DFS collection.
    pub dfs_visits: u64,
    /// Truncated leaves reached.
    pub leaves: u64,
}

/// Receives query results from [`CglTree::search`].
pub trait QuerySink {
    /// A pivot whose base suffix is within distance.
    fn pivot(&mut self, position: u32, distance: usize);
    /// A truncated leaf whose contents must be checked.
    fn leaf(&mut self, node: u32, leaf: &LeafNode);
}

/// Sink collecting pivot matches only; any leaf is an error for the full tree.
#[derive(Default, Debug)]
pub struct Collect {
    pub matches: Vec<(u32, usize)>,
    pub leaves: Vec<u32>,
}

impl QuerySink for Collect {
    fn pivot(&mut self, position: u32, distance: usize) {
        self.matches.push((position, distance));
    }
    fn leaf(&mut self, node: u32, _leaf: &LeafNode) {
        self.leaves.push(node);
    }
}

enum Task {
    Search { node: u32, q: AlteredString, r: usize },
    Dfs { node: u32 },
}

impl CglTree {
    /// Builds the tree over all suffixes of the context's text. `sigma = None`
    /// gives the full tree, where a one-element set is a childless pivot node.
    pub fn build(ctx: &QueryContext<'_>, k: usize, sigma: Option<usize>) -> BuildOutput {
        let text = ctx.text();
        let n = text.n();
        let mut tree = CglTree { nodes: Vec::new(), alts: Vec::new(), n, k, sigma };
        let mut leaf_members = Vec::new();
        let root: Vec<AlteredString> = (0..n).map(AlteredString::text_suffix).collect();
        let mut stack = vec![Pending { set: root, k_rem: k, path: PathLabel::EMPTY, parent: NONE, slot: Slot::LessM }];
        while let Some(p) = stack.pop() {
            let id = tree.nodes.len() as u32;
            if p.parent != NONE {
                if let Node::Pivot(parent) = &mut tree.nodes[p.parent as usize] {
                    parent.children[p.slot as usize] = id;
                }
            }
            let size = p.set.len() as u32;
            if sigma.is_some_and(|s| p.set.len() <= s) {
                let mut members: Vec<u32> = p
                    .set
                    .iter()
                    .map(|s| match s.base {
                        Base::Text(i) => i,
                        Base::Query(_) => unreachable!("tree sets hold text suffixes"),
                    })
                    .collect();
                members.sort_unstable();
                leaf_members.push(members);
                tree.nodes.push(Node::Leaf(LeafNode { label: 0, size, path: p.path }));
                continue;
            }
            let part = partition(p.set, p.k_rem, ctx);
            let base = match part.pivot.base {
                Base::Text(i) => i,
                Base::Query(_) => unreachable!(),
            };
            let alt_start = tree.alts.len() as u32;
            tree.alts.extend_from_slice(part.pivot.alterations());
            tree.nodes.push(Node::Pivot(PivotNode {
                base,
                alt_start,
                alt_len: part.pivot.alterations().len() as u8,
                m: part.m as u32,
                k_rem: p.k_rem as u8,
                size,
                children: [NONE; 7],
            }));
            let Partition { subsets, .. } = part;
            let mut children: Vec<Pending> = Vec::new();
            for (i, set) in subsets.into_iter().enumerate() {
                if set.is_empty() {
                    continue;
                }
                let slot = Slot::from_index(i);
                let altered = slot.is_altered();
                children.push(Pending {
                    set,
                    k_rem: p.k_rem - altered as usize,
                    path: p.path.push(altered),
                    parent: id,
                    slot,
                });
            }
            while let Some(c) = children.pop() {
                stack.push(c);
            }
        }
        tree.assign_labels();
        BuildOutput { tree, leaf_members }
    }

    /// Numbers leaves 1, 2, ... per path label in preorder.
    fn assign_labels(&mut self) {
        let mut counts = std::collections::HashMap::<PathLabel, u32>::new();
        for node in &mut self.nodes {
            if let Node::Leaf(l) = node {
                let c = counts.entry(l.path).or_insert(0);
                *c += 1;
                l.label = *c;
            }
        }
    }

    /// Reassembles a tree from stored parts (used by the file codec).
    pub fn from_parts(nodes: Vec<Node>, alts: Vec<Alteration>, n: usize, k: usize, sigma: Option<usize>) -> Self {
        CglTree { nodes, alts, n, k, sigma }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: u32) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn alterations(&self) -> &[Alteration] {
        &self.alts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sigma(&self) -> Option<usize> {
        self.sigma
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pivot_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Pivot(_))).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.len() - self.pivot_count()
    }

    /// The pivot of a pivot node as an altered string.
    pub fn pivot(&self, p: &PivotNode) -> AlteredRef<'_> {
        let a = p.alt_start as usize;
        AlteredRef { base: Base::Text(p.base), alts: &self.alts[a..a + p.alt_len as usize] }
    }

    /// Test hook: moves the child in slot `from` of `node` to slot `to`.
    #[doc(hidden)]
    pub fn move_child(&mut self, node: u32, from: Slot, to: Slot) {
        if let Node::Pivot(p) = &mut self.nodes[node as usize] {
            p.children[to as usize] = p.children[from as usize];
            p.children[from as usize] = NONE;
        }
    }

    /// Path label of every node, by index.
    pub fn path_labels(&self) -> Vec<PathLabel> {
        let mut out = vec![PathLabel::EMPTY; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Pivot(p) = node {
                for slot in Slot::ALL {
                    let c = p.children[slot as usize];
                    if c != NONE {
                        out[c as usize] = out[id].push(slot.is_altered());
                    }
                }
            }
        }
        out
    }

    pub fn path_label(&self, node: u32) -> PathLabel {
        self.path_labels()[node as usize]
    }

    /// Depth of every node (root 0), by index.
    pub fn depths(&self) -> Vec<usize> {
        self.path_labels().iter().map(|l| l.len()).collect()
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Side of `s` relative to the pivot of `node`, with `LCP(s, p)`.
    pub fn classify(&self, s: AlteredRef<'_>, p: &PivotNode, ctx: &QueryContext<'_>) -> (SubsetTag, usize) {
        let (ord, lcp) = ctx.compare(s, self.pivot(p));
        let m = p.m as usize;
        let tag = match (ord, lcp.cmp(&m)) {
            (Ordering::Equal, _) => SubsetTag::IsPivot,
            (_, Ordering::Less) => SubsetTag::LessM,
            (_, Ordering::Greater) => SubsetTag::GreaterM,
            (Ordering::Less, Ordering::Equal) => SubsetTag::LessL,
            (Ordering::Greater, Ordering::Equal) => SubsetTag::GreaterL,
        };
        (tag, lcp)
    }

    /// Follows unaltered children chosen by [`Self::classify`] from `start`.
    pub fn manual_traversal(&self, start: u32, s: AlteredRef<'_>, ctx: &QueryContext<'_>) -> Traversal {
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let p = match &self.nodes[cur as usize] {
                Node::Leaf(_) => return Traversal { path, end: TraversalEnd::Leaf },
                Node::Pivot(p) => p,
            };
            let (tag, _) = self.classify(s, p, ctx);
            let Some(slot) = tag.slot() else {
                return Traversal { path, end: TraversalEnd::IsPivot };
            };
            let c = p.children[slot as usize];
            if c == NONE {
                return Traversal { path, end: TraversalEnd::EmptySlot };
            }
            path.push(c);
            cur = c;
        }
    }

    /// Pivots (as text positions) of `node` and all its unaltered descendants.
    /// Truncated leaves below are returned separately.
    pub fn dfs_collect(&self, node: u32) -> (Vec<u32>, Vec<u32>) {
        let mut pivots = Vec::new();
        let mut leaves = Vec::new();
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            match &self.nodes[id as usize] {
                Node::Leaf(_) => leaves.push(id),
                Node::Pivot(p) => {
                    pivots.push(p.base);
                    for slot in Slot::UNALTERED.iter().rev() {
                        let c = p.children[*slot as usize];
                        if c != NONE {
                            stack.push(c);
                        }
                    }
                }
            }
        }
        (pivots, leaves)
    }

    /// Nodes below `v` (inclusive) among its unaltered descendants whose pivot
    /// has `q` as a prefix, plus the truncated leaves the same search reaches.
    pub fn matching_nodes(&self, v: u32, q: AlteredRef<'_>, ctx: &QueryContext<'_>) -> (Vec<u32>, Vec<u32>) {
        let mut nodes = Vec::new();
        let mut leaves = Vec::new();
        let mut stack = vec![(v, false)];
        let qlen = ctx.sources().len(q);
        while let Some((id, all)) = stack.pop() {
            let p = match &self.nodes[id as usize] {
                Node::Leaf(_) => {
                    leaves.push(id);
                    continue;
                }
                Node::Pivot(p) => p,
            };
            let push_all = |stack: &mut Vec<(u32, bool)>, slots: &[Slot]| {
                for s in slots {
                    let c = p.children[*s as usize];
                    if c != NONE {
                        stack.push((c, true));
                    }
                }
            };
            if all {
                nodes.push(id);
                push_all(&mut stack, &Slot::UNALTERED);
                continue;
            }
            let (tag, i) = self.classify(q, p, ctx);
            let m = p.m as usize;
            if i == qlen {
                nodes.push(id);
                match i.cmp(&m) {
                    Ordering::Less => {
                        push_all(&mut stack, &[Slot::LessL, Slot::GreaterL, Slot::GreaterM]);
                        if p.children[Slot::LessM as usize] != NONE {
                            stack.push((p.children[Slot::LessM as usize], false));
                        }
                    }
                    Ordering::Equal => push_all(&mut stack, &[Slot::LessL, Slot::GreaterL, Slot::GreaterM]),
                    Ordering::Greater => {
                        if p.children[Slot::GreaterM as usize] != NONE {
                            stack.push((p.children[Slot::GreaterM as usize], false));
                        }
                    }
                }
            } else if let Some(slot) = tag.slot() {
                let c = p.children[slot as usize];
                if c != NONE {
                    stack.push((c, false));
                }
            }
        }
        (nodes, leaves)
    }

    /// Runs the query recursion from the root with radius `r`, reporting
    /// matching pivots and reached truncated leaves to `sink`.
    pub fn search(
        &self,
        ctx: &QueryContext<'_>,
        r: usize,
        sink: &mut impl QuerySink,
        stats: &mut QueryStats,
    ) -> Result<(), QueryError> {
        if r > self.k {
            return Err(QueryError::RadiusOutOfRange { r, k: self.k });
        }
        if self.nodes.is_empty() {
            return Ok(());
        }
        let original = AlteredString::query();
        let src = ctx.sources();
        let emit = |sink: &mut dyn FnMut(u32, usize), base: u32| {
            if let Some(d) = ctx.within_distance(original.as_ref(), AlteredRef { base: Base::Text(base), alts: &[] }, r) {
                sink(base, d);
            }
        };
        let mut stack = vec![Task::Search { node: 0, q: original.clone(), r }];
        while let Some(task) = stack.pop() {
            match task {
                Task::Dfs { node } => {
                    stats.dfs_visits += 1;
                    match &self.nodes[node as usize] {
                        Node::Leaf(l) => {
                            stats.leaves += 1;
                            sink.leaf(node, l);
                        }
                        Node::Pivot(p) => {
                            emit(&mut |b, d| sink.pivot(b, d), p.base);
                            for slot in Slot::UNALTERED.iter().rev() {
                                let c = p.children[*slot as usize];
                                if c != NONE {
                                    stack.push(Task::Dfs { node: c });
                                }
                            }
                        }
                    }
                }
                Task::Search { node, q, r: rr } => {
                    stats.visited += 1;
                    if rr > 0 {
                        stats.visited_positive += 1;
                    }
                    let p = match &self.nodes[node as usize] {
                        Node::Leaf(l) => {
                            stats.leaves += 1;
                            sink.leaf(node, l);
                            continue;
                        }
                        Node::Pivot(p) => p,
                    };
                    let pivot = self.pivot(p);
                    let mm = ctx.first_mismatches(q.as_ref(), pivot, rr + 1);
                    if mm.positions.len() <= rr {
                        emit(&mut |b, d| sink.pivot(b, d), p.base);
                    }
                    let i = mm.positions.first().map_or(mm.overlap, |&x| x as usize);
                    let qlen = src.len(q.as_ref());
                    let m = p.m as usize;
                    let child = |s: Slot| p.children[s as usize];
                    let mut calls: SmallVec<[(Slot, bool, usize); 4]> = SmallVec::new();
                    let mut dfs: SmallVec<[Slot; 3]> = SmallVec::new();
                    // `true` in a call means "use the pivot-altered query".
                    if i < qlen {
                        debug_assert!(i < src.len(pivot), "pivot is never a prefix of a query");
                        let q_less = src.at(q.as_ref(), i) < src.at(pivot, i);
                        match i.cmp(&m) {
                            Ordering::Less => {
                                calls.push((Slot::LessM, false, rr));
                                if rr > 0 {
                                    calls.extend([
                                        (Slot::LessL, true, rr - 1),
                                        (Slot::GreaterL, true, rr - 1),
                                        (Slot::GreaterM, true, rr - 1),
                                    ]);
                                }
                            }
                            Ordering::Equal if q_less => {
                                calls.push((Slot::LessL, false, rr));
                                if rr > 0 {
                                    calls.extend([
                                        (Slot::AltLessM, false, rr - 1),
                                        (Slot::AltGreaterL, true, rr - 1),
                                        (Slot::GreaterM, true, rr - 1),
                                    ]);
                                }
                            }
                            Ordering::Equal => {
                                calls.push((Slot::GreaterL, false, rr));
                                if rr > 0 {
                                    calls.extend([
                                        (Slot::AltLessM, false, rr - 1),
                                        (Slot::AltLessL, true, rr - 1),
                                        (Slot::GreaterM, true, rr - 1),
                                    ]);
                                }
                            }
                            Ordering::Greater => {
                                calls.push((Slot::GreaterM, false, rr));
                                if rr > 0 {
                                    calls.extend([
                                        (Slot::AltLessM, false, rr - 1),
                                        (Slot::AltLessL, false, rr - 1),
                                        (Slot::AltGreaterL, false, rr - 1),
                                    ]);
                                }
                            }
                        }
                    } else {
                        match i.cmp(&m) {
                            Ordering::Less => {
                                calls.push((Slot::LessM, false, rr));
                                dfs.extend([Slot::LessL, Slot::GreaterL, Slot::GreaterM]);
                            }
                            Ordering::Equal => {
                                if rr > 0 {
                                    calls.push((Slot::AltLessM, false, rr - 1));
                                }
                                dfs.extend([Slot::LessL, Slot::GreaterL, Slot::GreaterM]);
                            }
                            Ordering::Greater => {
                                calls.push((Slot::GreaterM, false, rr));
                                if rr > 0 {
                                    calls.extend([
                                        (Slot::AltLessM, false, rr - 1),
                                        (Slot::AltLessL, false, rr - 1),
                                        (Slot::AltGreaterL, false, rr - 1),
                                    ]);
                                }
                            }
                        }
                    }
                    let mut hat: Option<AlteredString> = None;
                    for &s in dfs.iter().rev() {
                        if child(s) != NONE {
                            stack.push(Task::Dfs { node: child(s) });
                        }
                    }
                    for &(s, use_hat, r2) in calls.iter().rev() {
                        let c = child(s);
                        if c == NONE {
                            continue;
                        }
                        let q2 = if use_hat {
                            hat.get_or_insert_with(|| {
                                pivot_alter(q.as_ref(), i, pivot, &src)
                                    .expect("query mismatch lies inside both strings")
                            })
                            .clone()
                        } else {
                            q.clone()
                        };
                        stack.push(Task::Search { node: c, q: q2, r: r2 });
                    }
                }
            }
        }
        Ok(())
    }

    /// Query on the full tree: sorted `(position, distance)` pairs, 0-based.
    pub fn query_full(
        &self,
        ctx: &QueryContext<'_>,
        r: usize,
        stats: &mut QueryStats,
    ) -> Result<Vec<(u32, usize)>, QueryError> {
        if self.sigma.is_some() {
            return Err(QueryError::TruncatedTree);
        }
        let mut sink = Collect::default();
        self.search(ctx, r, &mut sink, stats)?;
        sink.matches.sort_unstable();
        Ok(sink.matches)
    }
}
