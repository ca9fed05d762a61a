//! The assembled index: truncated tree, one inversion structure per path
//! label, and the final distance filter.

use std::collections::BTreeMap;

use crate::dictionary::{dictionary_query_transform, dictionary_transform, DictionaryCorpus};
use crate::error::{BuildError, QueryError};
use crate::fninv::{mix64, InversionIndex, InversionParams, DEFAULT_CLUSTER_CAP};
use crate::lcp::{LcpBackend, QueryContext};
use crate::text::{pad_text, AlteredRef, AlteredString, Base, PaddedText, Symbol};
use crate::tree::{CglTree, LeafNode, PathLabel, QuerySink, QueryStats};
use crate::trunc::{truncate_labels, TruncTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact suffix-array LCPs.
    Linear,
    /// Sampled fingerprints every `tau` positions.
    Succinct { tau: usize },
}

impl Mode {
    pub fn tau(self) -> usize {
        match self {
            Mode::Linear => 1,
            Mode::Succinct { tau } => tau,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildParams {
    pub k: usize,
    pub sigma: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Upper bound on clusters per inversion structure; `None` is uncapped.
    pub cluster_cap: Option<u32>,
    /// Recheck fingerprint LCPs by direct scans.
    pub paranoid: bool,
    /// Keep leaf contents for inspection.
    pub audit: bool,
}

impl BuildParams {
    pub fn new(k: usize, sigma: usize) -> Self {
        BuildParams {
            k,
            sigma,
            mode: Mode::Linear,
            seed: 0,
            cluster_cap: Some(DEFAULT_CLUSTER_CAP),
            paranoid: false,
            audit: false,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn cluster_cap(mut self, cap: Option<u32>) -> Self {
        self.cluster_cap = cap;
        self
    }

    pub fn paranoid(mut self, on: bool) -> Self {
        self.paranoid = on;
        self
    }

    pub fn audit(mut self, on: bool) -> Self {
        self.audit = on;
        self
    }
}

/// One reported occurrence. `position` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub position: usize,
    pub distance: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub n: usize,
    pub k: usize,
    pub sigma: usize,
    pub nodes: usize,
    pub pivots: usize,
    pub leaves: usize,
    pub height: usize,
    /// Leaves per path label.
    pub leaves_per_label: BTreeMap<PathLabel, u32>,
    pub cluster_entries: usize,
    pub missing_entries: usize,
    pub fingerprints: usize,
}

impl BuildReport {
    pub fn labels(&self) -> usize {
        self.leaves_per_label.len()
    }

    pub fn max_leaves_per_label(&self) -> u32 {
        self.leaves_per_label.values().copied().max().unwrap_or(0)
    }
}

/// Counters for one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryReport {
    pub stats: QueryStats,
    /// Size of the leaf list.
    pub leaf_list: usize,
    /// Suffixes recovered by inversion and checked against the query.
    pub candidates: usize,
    pub lcp_calls: u64,
    pub detections: u64,
}

#[derive(Clone, Debug)]
pub struct MismatchIndex {
    text: PaddedText,
    backend: LcpBackend,
    trunc: TruncTree,
    inversions: BTreeMap<PathLabel, InversionIndex>,
    params: BuildParams,
}

/// Seed of the inversion structure for `lambda`.
pub fn label_seed(seed: u64, lambda: PathLabel) -> u64 {
    mix64(seed ^ mix64(lambda.bits ^ ((lambda.len as u64) << 56)))
}

fn backend_for(text: &PaddedText, params: &BuildParams) -> Result<LcpBackend, BuildError> {
    Ok(match params.mode {
        Mode::Linear => LcpBackend::exact(text, params.seed, params.paranoid),
        Mode::Succinct { tau: 0 } => return Err(BuildError::TauZero),
        Mode::Succinct { tau } => LcpBackend::sampled(text, tau, params.seed, params.paranoid),
    })
}

struct Gather {
    pivots: Vec<(u32, usize)>,
    leaves: Vec<(PathLabel, u32)>,
}

impl QuerySink for Gather {
    fn pivot(&mut self, position: u32, distance: usize) {
        self.pivots.push((position, distance));
    }
    fn leaf(&mut self, _node: u32, leaf: &LeafNode) {
        self.leaves.push((leaf.path, leaf.label));
    }
}

impl MismatchIndex {
    pub fn build(raw: &[Symbol], params: BuildParams) -> Result<Self, BuildError> {
        let text = pad_text(raw, params.k)?;
        Self::build_padded(text, params)
    }

    /// Builds over an already padded text (which may contain reserved codes).
    pub fn build_padded(text: PaddedText, params: BuildParams) -> Result<Self, BuildError> {
        if params.sigma == 0 {
            return Err(BuildError::SigmaZero);
        }
        let backend = backend_for(&text, &params)?;
        let ctx = QueryContext::for_text(&text, &backend);
        let out = CglTree::build(&ctx, params.k, Some(params.sigma));
        let (trunc, tables) = truncate_labels(out, params.audit);
        let n = text.n() as u32;
        let inversions = tables
            .into_iter()
            .map(|(lambda, table)| {
                let ip = InversionParams::new(
                    n,
                    params.sigma as u32,
                    params.cluster_cap,
                    label_seed(params.seed, lambda),
                );
                let f = |i: u32| Some(table[i as usize]).filter(|&l| l != 0);
                (lambda, InversionIndex::build(&f, ip))
            })
            .collect();
        Ok(MismatchIndex { text, backend, trunc, inversions, params })
    }

    /// Reassembles an index from stored parts; the LCP backend is rebuilt.
    pub fn from_parts(
        text: PaddedText,
        params: BuildParams,
        tree: CglTree,
        inversions: BTreeMap<PathLabel, InversionIndex>,
    ) -> Result<Self, BuildError> {
        let backend = backend_for(&text, &params)?;
        Ok(MismatchIndex { text, backend, trunc: TruncTree::from_tree(tree), inversions, params })
    }

    pub fn text(&self) -> &PaddedText {
        &self.text
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn trunc(&self) -> &TruncTree {
        &self.trunc
    }

    pub fn tree(&self) -> &CglTree {
        self.trunc.tree()
    }

    pub fn backend(&self) -> &LcpBackend {
        &self.backend
    }

    pub fn inversions(&self) -> &BTreeMap<PathLabel, InversionIndex> {
        &self.inversions
    }

    /// Context for text-only work (label evaluation, invariant checks).
    pub fn text_context(&self) -> QueryContext<'_> {
        QueryContext::for_text(&self.text, &self.backend)
    }

    pub fn report(&self) -> BuildReport {
        let tree = self.tree();
        BuildReport {
            n: self.text.n(),
            k: self.params.k,
            sigma: self.params.sigma,
            nodes: tree.len(),
            pivots: tree.pivot_count(),
            leaves: tree.leaf_count(),
            height: tree.height(),
            leaves_per_label: self.trunc.label_counts().clone(),
            cluster_entries: self.inversions.values().map(InversionIndex::cluster_entries).sum(),
            missing_entries: self.inversions.values().map(InversionIndex::missing_entries).sum(),
            fingerprints: self.backend.stored_fingerprints(),
        }
    }

    fn check_radius(&self, r: usize) -> Result<(), QueryError> {
        if r > self.params.k {
            return Err(QueryError::RadiusOutOfRange { r, k: self.params.k });
        }
        Ok(())
    }

    /// Runs the tree recursion: the leaf list and the pivots accepted on the way
    /// (0-based positions).
    pub fn collect_leaves(
        &self,
        ctx: &QueryContext<'_>,
        r: usize,
        stats: &mut QueryStats,
    ) -> Result<(Vec<(PathLabel, u32)>, Vec<(u32, usize)>), QueryError> {
        self.check_radius(r)?;
        let mut sink = Gather { pivots: Vec::new(), leaves: Vec::new() };
        self.tree().search(ctx, r, &mut sink, stats)?;
        Ok((sink.leaves, sink.pivots))
    }

    /// Contents of the leaf `(lambda, label)` recovered by inversion.
    pub fn leaf_contents(&self, lambda: PathLabel, label: u32, ctx: &QueryContext<'_>) -> Vec<u32> {
        let Some(inv) = self.inversions.get(&lambda) else {
            return Vec::new();
        };
        let f = |i: u32| self.trunc.eval_f(lambda, i, ctx);
        inv.invert(&f, Some(label)).expect("labels are never undefined")
    }

    pub fn query(&self, q: &[Symbol], r: usize) -> Result<Vec<Match>, QueryError> {
        self.query_with_report(q, r).map(|(m, _)| m)
    }

    pub fn query_with_report(&self, q: &[Symbol], r: usize) -> Result<(Vec<Match>, QueryReport), QueryError> {
        self.check_radius(r)?;
        let ctx = QueryContext::new(&self.text, &self.backend, q)?;
        let mut report = QueryReport::default();
        let (leaves, pivots) = self.collect_leaves(&ctx, r, &mut report.stats)?;
        report.leaf_list = leaves.len();
        #[cfg(debug_assertions)]
        {
            let mut seen = leaves.clone();
            seen.sort_unstable();
            seen.dedup();
            debug_assert_eq!(seen.len(), leaves.len(), "leaf list has duplicates");
        }
        let mut out: Vec<Match> =
            pivots.into_iter().map(|(p, d)| Match { position: p as usize + 1, distance: d }).collect();
        let query = AlteredString::query();
        for (lambda, label) in leaves {
            for i in self.leaf_contents(lambda, label, &ctx) {
                report.candidates += 1;
                let s = AlteredRef { base: Base::Text(i), alts: &[] };
                if let Some(d) = ctx.within_distance(query.as_ref(), s, r) {
                    out.push(Match { position: i as usize + 1, distance: d });
                }
            }
        }
        out.sort_unstable();
        #[cfg(debug_assertions)]
        debug_assert!(out.windows(2).all(|w| w[0].position != w[1].position), "duplicate output position");
        #[cfg(not(debug_assertions))]
        out.dedup_by_key(|m| m.position);
        report.lcp_calls = ctx.lcp_calls();
        report.detections = ctx.detections();
        Ok((out, report))
    }
}

/// Dictionary lookups served by a text index over the transformed entries.
#[derive(Clone, Debug)]
pub struct DictionaryIndex {
    corpus: DictionaryCorpus,
    index: MismatchIndex,
}

/// A dictionary hit: entry number (0-based) and distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EntryMatch {
    pub entry: usize,
    pub distance: usize,
}

impl DictionaryIndex {
    pub fn build(entries: &[Vec<Symbol>], params: BuildParams) -> Result<Self, BuildError> {
        let corpus = dictionary_transform(entries, params.k)?;
        let index = MismatchIndex::build_padded(corpus.transformed().clone(), params)?;
        Ok(DictionaryIndex { corpus, index })
    }

    pub fn corpus(&self) -> &DictionaryCorpus {
        &self.corpus
    }

    pub fn index(&self) -> &MismatchIndex {
        &self.index
    }

    /// Entries of the same length as `q` within distance `r`.
    pub fn query(&self, q: &[Symbol], r: usize) -> Result<Vec<EntryMatch>, QueryError> {
        let tq = dictionary_query_transform(q)?;
        let hits = self.index.query(&tq, r)?;
        Ok(hits
            .into_iter()
            .filter_map(|m| {
                let e = self.corpus.entry_at(m.position - 1)?;
                (self.corpus.entries()[e].len() == q.len()).then_some(EntryMatch { entry: e, distance: m.distance })
            })
            .collect())
    }
}
