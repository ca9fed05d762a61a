//! The sigma/k sweep behind `mmidx bench`.

use std::time::Instant;

use mismatch_index::text::ceil_log2;
use mismatch_index::{BuildError, BuildParams, MismatchIndex, Mode, QueryError, Symbol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::persist;
use crate::workload::random_query;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub sigma: usize,
    pub tau: usize,
    pub index_bytes: usize,
    /// Tree section only: pivots, shape and leaf labels.
    pub tree_bytes: usize,
    pub inversion_bytes: usize,
    pub nodes: usize,
    pub leaves: usize,
    pub labels: usize,
    /// Largest number of leaves sharing one path label.
    pub max_leaves_per_label: u32,
    pub missing_entries: usize,
    pub build_seconds: f64,
    pub queries: usize,
    pub mean_query_us: f64,
    pub median_query_us: f64,
    /// Mean leaf-list length.
    pub mean_leaf_list: f64,
    pub mean_visited: f64,
    /// Largest count of visited nodes whose subtree may hold a match.
    pub max_visited_positive: u64,
    /// `3^k * C(ceil(log2 n) + 1, k)`.
    pub visited_bound: u64,
    pub mean_output: f64,
}

impl BenchRow {
    /// Row with timings zeroed, for determinism checks.
    pub fn structural(&self) -> BenchRow {
        BenchRow { build_seconds: 0.0, mean_query_us: 0.0, median_query_us: 0.0, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn visited_bound(n: usize, k: usize) -> u64 {
    3u64.pow(k as u32) * binomial(ceil_log2(n) as u64 + 1, k as u64)
}

pub struct SweepConfig {
    pub ks: Vec<usize>,
    pub sigmas: Vec<usize>,
    pub mode: Mode,
    pub queries: usize,
    pub max_query_len: usize,
    pub seed: u64,
}

pub fn run(raw: &[Symbol], cfg: &SweepConfig) -> Result<BenchReport, SweepError> {
    let mut rows = Vec::new();
    for &k in &cfg.ks {
        for &sigma in &cfg.sigmas {
            let params = BuildParams::new(k, sigma).mode(cfg.mode).seed(cfg.seed);
            let t = Instant::now();
            let index = MismatchIndex::build(raw, params)?;
            let build_seconds = t.elapsed().as_secs_f64();
            let rep = index.report();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (k as u64) << 32 ^ sigma as u64);
            let mut times = Vec::with_capacity(cfg.queries);
            let (mut leaf_list, mut visited, mut output, mut max_pos) = (0usize, 0u64, 0usize, 0u64);
            for _ in 0..cfg.queries {
                let (q, r) = random_query(raw, k, cfg.max_query_len, &mut rng);
                let t = Instant::now();
                let (hits, qr) = index.query_with_report(&q, r)?;
                times.push(t.elapsed().as_secs_f64() * 1e6);
                leaf_list += qr.leaf_list;
                visited += qr.stats.visited;
                output += hits.len();
                max_pos = max_pos.max(qr.stats.visited_positive);
            }
            let qn = cfg.queries.max(1) as f64;
            times.sort_by(f64::total_cmp);
            let median = if times.is_empty() { 0.0 } else { times[times.len() / 2] };
            rows.push(BenchRow {
                n: raw.len(),
                k,
                sigma,
                tau: cfg.mode.tau(),
                index_bytes: persist::to_bytes(&index, true).len(),
                tree_bytes: persist::tree_bytes(index.tree()),
                inversion_bytes: persist::inversion_bytes(&index),
                nodes: rep.nodes,
                leaves: rep.leaves,
                labels: rep.labels(),
                max_leaves_per_label: rep.max_leaves_per_label(),
                missing_entries: rep.missing_entries,
                build_seconds,
                queries: cfg.queries,
                mean_query_us: times.iter().sum::<f64>() / qn,
                median_query_us: median,
                mean_leaf_list: leaf_list as f64 / qn,
                mean_visited: visited as f64 / qn,
                max_visited_positive: max_pos,
                visited_bound: visited_bound(raw.len(), k),
                mean_output: output as f64 / qn,
            });
        }
    }
    Ok(BenchReport { seed: cfg.seed, rows })
}
