//! All-preimage function inversion with chains, clusters and a missing-items
//! dictionary.
//!
//! `f: [0, n) -> [1, n) ∪ {None}` with every preimage of size at most `sigma`.
//! Each cluster owns a hash `g_c: [0, 2n) -> [0, n)` and the step
//! `h_c(i) = g_c(f(i))`, or `g_c(n + i)` where `f(i)` is undefined. Chains of
//! `L` steps from sampled starts are stored as end -> start. A query for `j`
//! walks from `g_c(j)` and, on the first stored end, replays that chain and
//! keeps every element mapping to `j`. Whatever the chains miss is stored
//! explicitly, which makes the answer exact for every `j`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::InversionError;

/// A function on `[0, n)` that may be undefined at some points.
pub trait Evaluator {
    fn eval(&self, i: u32) -> Option<u32>;
}

impl<F: Fn(u32) -> Option<u32>> Evaluator for F {
    fn eval(&self, i: u32) -> Option<u32> {
        self(i)
    }
}

/// Default cluster cap.
pub const DEFAULT_CLUSTER_CAP: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InversionParams {
    pub n: u32,
    pub sigma: u32,
    /// Steps per chain; a chain has `chain_len + 1` values.
    pub chain_len: u32,
    pub clusters: u32,
    pub starts: u32,
    pub seed: u64,
}

impl InversionParams {
    /// Defaults from `n` and `sigma`; `cap = None` leaves the cluster count
    /// uncapped.
    pub fn new(n: u32, sigma: u32, cap: Option<u32>, seed: u64) -> Self {
        let sigma = sigma.max(1);
        let s = sigma as f64;
        let chain_len = ((s * (s + 1.0).log2()).ceil() as u32).max(1);
        let full = (s * s * (s + 2.0).log2().powi(3)).ceil() as u64;
        let clusters = match cap {
            Some(c) => full.min(c as u64) as u32,
            None => full.min(u32::MAX as u64) as u32,
        };
        let l3 = (chain_len as u64).pow(3);
        let starts = (n as u64).div_ceil(l3).max(1) as u32;
        InversionParams { n, sigma, chain_len, clusters, starts, seed }
    }
}

#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// `g_c(x)` reduced into `[0, n)`.
#[inline]
pub fn g(seed: u64, x: u64, n: u32) -> u32 {
    ((mix64(seed ^ mix64(x)) as u128 * n as u128) >> 64) as u32
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub seed: u64,
    /// `(end, start)` pairs sorted by end, one per end.
    pub ends: Vec<(u32, u32)>,
}

impl Cluster {
    pub fn lookup(&self, end: u32) -> Option<u32> {
        self.ends.binary_search_by_key(&end, |e| e.0).ok().map(|i| self.ends[i].1)
    }
}

#[inline]
pub fn h_step(c: &Cluster, i: u32, n: u32, f: &impl Evaluator) -> u32 {
    match f.eval(i) {
        Some(j) => g(c.seed, j as u64, n),
        None => g(c.seed, n as u64 + i as u64, n),
    }
}

/// Builds all clusters. Seeds and starts come from one RNG stream so the
/// result does not depend on thread scheduling.
pub fn build_clusters(f: &(impl Evaluator + Sync), params: &InversionParams) -> Vec<Cluster> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let plan: Vec<(u64, Vec<u32>)> = (0..params.clusters)
        .map(|_| {
            let seed = rng.gen();
            let starts = (0..params.starts).map(|_| rng.gen_range(0..params.n)).collect();
            (seed, starts)
        })
        .collect();
    plan.into_par_iter()
        .map(|(seed, starts)| {
            let mut c = Cluster { seed, ends: Vec::with_capacity(starts.len()) };
            let mut ends: Vec<(u32, u32, usize)> = starts
                .iter()
                .enumerate()
                .map(|(order, &x)| {
                    let mut w = x;
                    for _ in 0..params.chain_len {
                        w = h_step(&c, w, params.n, f);
                    }
                    (w, x, order)
                })
                .collect();
            // First writer per end wins.
            ends.sort_unstable_by_key(|e| (e.0, e.2));
            ends.dedup_by_key(|e| e.0);
            c.ends = ends.into_iter().map(|(e, s, _)| (e, s)).collect();
            c
        })
        .collect()
}

/// Elements the chains alone recover for `j`.
pub fn invert_chains_only(f: &impl Evaluator, clusters: &[Cluster], params: &InversionParams, j: u32) -> Vec<u32> {
    let n = params.n;
    let mut out = Vec::new();
    for c in clusters {
        let mut w = g(c.seed, j as u64, n);
        for t in 0..params.chain_len {
            if let Some(start) = c.lookup(w) {
                let mut x = start;
                for step in 0..=params.chain_len {
                    if f.eval(x) == Some(j) {
                        out.push(x);
                    }
                    if step < params.chain_len {
                        x = h_step(c, x, n, f);
                    }
                }
                break;
            }
            if t + 1 < params.chain_len {
                w = h_step(c, w, n, f);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Preimage elements the chains do not recover, keyed by image.
pub type MissingDict = BTreeMap<u32, Vec<u32>>;

/// Certifies coverage by running the real chain query for every image value.
pub fn build_missing(f: &(impl Evaluator + Sync), clusters: &[Cluster], params: &InversionParams) -> MissingDict {
    let mut by_image: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for i in 0..params.n {
        if let Some(j) = f.eval(i) {
            by_image.entry(j).or_default().push(i);
        }
    }
    let groups: Vec<(u32, Vec<u32>)> = by_image.into_iter().collect();
    groups
        .into_par_iter()
        .filter_map(|(j, pre)| {
            let found = invert_chains_only(f, clusters, params, j);
            let missing: Vec<u32> = pre.into_iter().filter(|i| found.binary_search(i).is_err()).collect();
            (!missing.is_empty()).then_some((j, missing))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionIndex {
    pub params: InversionParams,
    pub clusters: Vec<Cluster>,
    pub missing: MissingDict,
}

impl InversionIndex {
    pub fn build(f: &(impl Evaluator + Sync), params: InversionParams) -> Self {
        let clusters = build_clusters(f, &params);
        let missing = build_missing(f, &clusters, &params);
        InversionIndex { params, clusters, missing }
    }

    /// Every `i` with `f(i) = j`, sorted.
    pub fn invert(&self, f: &impl Evaluator, j: Option<u32>) -> Result<Vec<u32>, InversionError> {
        let j = j.ok_or(InversionError::BotQuery)?;
        let mut out = invert_chains_only(f, &self.clusters, &self.params, j);
        if let Some(extra) = self.missing.get(&j) {
            out.extend_from_slice(extra);
            out.sort_unstable();
            out.dedup();
        }
        Ok(out)
    }

    pub fn cluster_entries(&self) -> usize {
        self.clusters.iter().map(|c| c.ends.len()).sum()
    }

    pub fn missing_entries(&self) -> usize {
        self.missing.values().map(Vec::len).sum()
    }

    /// Stored words: one per cluster seed, two per chain entry, one per missing
    /// element plus one per missing key.
    pub fn space_words(&self) -> usize {
        self.clusters.len() + 2 * self.cluster_entries() + self.missing_entries() + self.missing.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &impl Evaluator, n: u32, j: u32) -> Vec<u32> {
        (0..n).filter(|&i| f.eval(i) == Some(j)).collect()
    }

    #[test]
    fn defaults() {
        let p = InversionParams::new(1000, 1, Some(64), 0);
        assert_eq!((p.chain_len, p.clusters, p.starts), (1, 4, 1000));
        let p = InversionParams::new(1000, 4, Some(64), 0);
        assert_eq!(p.chain_len, 10);
        assert_eq!(p.clusters, 64);
        assert_eq!(p.starts, 1);
        let p = InversionParams::new(1000, 16, None, 0);
        assert_eq!(p.chain_len, 66);
        assert_eq!(p.clusters, ((256.0f64) * 18f64.log2().powi(3)).ceil() as u32);
        let p = InversionParams::new(1000, 4, Some(0), 0);
        assert_eq!(p.clusters, 0);
    }

    #[test]
    fn h_step_formula() {
        let n = 50;
        let c = Cluster { seed: 99, ends: vec![] };
        let bot = |_: u32| None;
        let dec = |i: u32| i.checked_sub(1).filter(|&x| x >= 1);
        for i in 0..n {
            assert_eq!(h_step(&c, i, n, &bot), g(99, (n + i) as u64, n));
            let want = match dec(i) {
                Some(j) => g(99, j as u64, n),
                None => g(99, (n + i) as u64, n),
            };
            assert_eq!(h_step(&c, i, n, &dec), want);
            assert!(h_step(&c, i, n, &dec) < n);
        }
    }

    #[test]
    fn single_chain() {
        let f = |i: u32| Some(i % 7 + 1);
        let params = InversionParams { n: 30, sigma: 5, chain_len: 1, clusters: 1, starts: 1, seed: 3 };
        let cs = build_clusters(&f, &params);
        assert_eq!(cs[0].ends.len(), 1);
        let (end, start) = cs[0].ends[0];
        assert_eq!(h_step(&cs[0], start, 30, &f), end);
    }

    #[test]
    fn everything_missing_without_clusters() {
        let f = |i: u32| (i < 40).then_some(i / 4 + 1);
        let params = InversionParams::new(64, 4, Some(0), 1);
        let idx = InversionIndex::build(&f, params);
        assert_eq!(idx.missing.len(), 10);
        assert_eq!(idx.missing_entries(), 40);
        for j in 1..64 {
            assert_eq!(idx.invert(&f, Some(j)).unwrap(), brute(&f, 64, j));
        }
        assert_eq!(idx.invert(&f, None), Err(InversionError::BotQuery));
    }

    #[test]
    fn block_function() {
        for sigma in [1u32, 3, 4, 16] {
            let n = 1024;
            let f = |i: u32| Some(i / sigma + 1).filter(|&j| j < n);
            let caps: &[Option<u32>] = if sigma <= 4 { &[Some(0), Some(4), None] } else { &[Some(0), Some(4)] };
            for &cap in caps {
                let idx = InversionIndex::build(&f, InversionParams::new(n, sigma, cap, 77));
                for j in 1..n {
                    let want: Vec<u32> = (sigma * (j - 1)..(sigma * j).min(n)).collect();
                    assert_eq!(idx.invert(&f, Some(j)).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn all_bottom() {
        let f = |_: u32| None;
        let idx = InversionIndex::build(&f, InversionParams::new(100, 2, Some(8), 4));
        assert!(idx.missing.is_empty());
        for j in 1..100 {
            assert!(idx.invert(&f, Some(j)).unwrap().is_empty());
        }
    }

    #[test]
    fn deterministic() {
        let f = |i: u32| Some((i * 7) % 97 + 1);
        let a = InversionIndex::build(&f, InversionParams::new(300, 4, Some(16), 5));
        let b = InversionIndex::build(&f, InversionParams::new(300, 4, Some(16), 5));
        assert_eq!(a, b);
    }

    #[test]
    fn coverage_improves_with_clusters() {
        let n = 4096u32;
        let f = |i: u32| Some(((i as u64 * 2654435761) % (n as u64 / 2)) as u32 + 1);
        let missing: Vec<usize> = [0u32, 2, 8, 32]
            .iter()
            .map(|&c| InversionIndex::build(&f, InversionParams::new(n, 2, Some(c), 9)).missing_entries())
            .collect();
        assert_eq!(missing[0], n as usize);
        assert!(missing.windows(2).all(|w| w[1] <= w[0]), "{missing:?}");
        assert!(missing[3] < missing[0]);
    }
}
