//! Longest-common-prefix backends and first-mismatch search on altered strings.
//!
//! Two backends exist. The exact one keeps a suffix array, the Kasai LCP array
//! and a sparse table, so text-vs-text LCPs are table lookups; text-vs-query
//! LCPs go through full Karp-Rabin prefix fingerprints. The sampled backend
//! keeps one fingerprint every `tau` positions and answers both pairings by
//! galloping over block boundaries followed by at most `tau` direct reads.
//!
//! With `paranoid` set, every fingerprint-derived LCP is rechecked by a direct
//! scan; a disagreement is counted and the scanned value wins.

pub mod fingerprint;
pub mod rmq;
pub mod suffix_array;

use std::cell::Cell;
use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::TextError;
use crate::text::{AlteredRef, Base, PaddedText, Sources, Symbol, SENTINEL};
use fingerprint::{full_prefixes, mul, pow, sub, SampledPrefixes};
use rmq::SparseTable;

#[derive(Clone, Debug)]
struct ExactTables {
    rank: Vec<u32>,
    lcp: SparseTable,
}

#[derive(Clone, Debug)]
pub struct LcpBackend {
    exact: Option<ExactTables>,
    prefixes: SampledPrefixes,
    paranoid: bool,
    seed: u64,
}

/// Fingerprint base drawn from `seed`.
pub fn fingerprint_base(seed: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed).gen_range(1 << 20..fingerprint::MODULUS - 1)
}

impl LcpBackend {
    /// Exact backend: suffix array, LCP array and RMQ.
    pub fn exact(text: &PaddedText, seed: u64, paranoid: bool) -> Self {
        let s = text.symbols();
        let sa = suffix_array::suffix_array(s);
        let rank = suffix_array::ranks(&sa);
        let lcp = suffix_array::kasai(s, &sa, &rank);
        LcpBackend {
            exact: Some(ExactTables { rank, lcp: SparseTable::new(&lcp) }),
            prefixes: SampledPrefixes::build(s, 1, fingerprint_base(seed)),
            paranoid,
            seed,
        }
    }

    /// Sampled-fingerprint backend with block length `tau`.
    pub fn sampled(text: &PaddedText, tau: usize, seed: u64, paranoid: bool) -> Self {
        LcpBackend {
            exact: None,
            prefixes: SampledPrefixes::build(text.symbols(), tau, fingerprint_base(seed)),
            paranoid,
            seed,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn tau(&self) -> usize {
        if self.is_exact() {
            1
        } else {
            self.prefixes.tau()
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn paranoid(&self) -> bool {
        self.paranoid
    }

    pub fn set_paranoid(&mut self, on: bool) {
        self.paranoid = on;
    }

    /// Number of stored text fingerprints.
    pub fn stored_fingerprints(&self) -> usize {
        self.prefixes.stored()
    }
}

/// Positions (0-based) of the first mismatches between two altered strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatches {
    pub positions: SmallVec<[u32; 8]>,
    /// Fewer than `limit` mismatches exist in the overlap.
    pub exhausted: bool,
    /// `min(|a|, |b|)`.
    pub overlap: usize,
}

/// Per-query state: the query, its prefix fingerprints and call counters.
pub struct QueryContext<'a> {
    text: &'a PaddedText,
    backend: &'a LcpBackend,
    query: &'a [Symbol],
    q_prefix: Vec<u64>,
    q_pow: Vec<u64>,
    lcp_calls: Cell<u64>,
    detections: Cell<u64>,
}

impl<'a> QueryContext<'a> {
    /// Context for a query; the query must be non-empty and sentinel-free.
    pub fn new(
        text: &'a PaddedText,
        backend: &'a LcpBackend,
        query: &'a [Symbol],
    ) -> Result<Self, TextError> {
        if query.is_empty() {
            return Err(TextError::EmptyQuery);
        }
        if let Some(position) = query.iter().position(|&c| c == SENTINEL) {
            return Err(TextError::SentinelInQuery { position });
        }
        Ok(Self::build(text, backend, query))
    }

    /// Context without a query, for text-vs-text work.
    pub fn for_text(text: &'a PaddedText, backend: &'a LcpBackend) -> Self {
        Self::build(text, backend, &[])
    }

    fn build(text: &'a PaddedText, backend: &'a LcpBackend, query: &'a [Symbol]) -> Self {
        let base = backend.prefixes.base();
        let q_prefix = full_prefixes(query, base);
        let mut q_pow = Vec::with_capacity(query.len() + 1);
        let mut p = 1u64;
        for _ in 0..=query.len() {
            q_pow.push(p);
            p = mul(p, base);
        }
        QueryContext {
            text,
            backend,
            query,
            q_prefix,
            q_pow,
            lcp_calls: Cell::new(0),
            detections: Cell::new(0),
        }
    }

    pub fn text(&self) -> &'a PaddedText {
        self.text
    }

    pub fn query(&self) -> &'a [Symbol] {
        self.query
    }

    pub fn sources(&self) -> Sources<'a> {
        Sources { text: self.text.symbols(), query: self.query }
    }

    pub fn lcp_calls(&self) -> u64 {
        self.lcp_calls.get()
    }

    pub fn reset_lcp_calls(&self) {
        self.lcp_calls.set(0);
    }

    /// Paranoid-mode disagreements between fingerprints and direct scans.
    pub fn detections(&self) -> u64 {
        self.detections.get()
    }

    pub fn base_len(&self, b: Base) -> usize {
        self.sources().base_len(b)
    }

    /// LCP of two unaltered base strings.
    pub fn lcp(&self, a: Base, b: Base) -> usize {
        let max = self.base_len(a).min(self.base_len(b));
        self.raw_lcp(a, b, max)
    }

    /// LCP of two unaltered base strings, capped at `max` (which must not exceed
    /// either length).
    pub fn raw_lcp(&self, a: Base, b: Base, max: usize) -> usize {
        self.lcp_calls.set(self.lcp_calls.get() + 1);
        if max == 0 {
            return 0;
        }
        match (a, b) {
            (Base::Text(i), Base::Text(j)) => {
                if i == j {
                    return max;
                }
                if let Some(ex) = &self.backend.exact {
                    let (ri, rj) = (ex.rank[i as usize] as usize, ex.rank[j as usize] as usize);
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    return (ex.lcp.min(lo + 1, hi) as usize).min(max);
                }
                let got = self.text_text_fp(i as usize, j as usize, max);
                self.verify(a, b, max, got)
            }
            (Base::Text(i), Base::Query(j)) | (Base::Query(j), Base::Text(i)) => {
                let got = self.text_query_fp(i as usize, j as usize, max);
                self.verify(a, b, max, got)
            }
            (Base::Query(_), Base::Query(_)) => self.scan(a, b, max),
        }
    }

    fn scan(&self, a: Base, b: Base, max: usize) -> usize {
        let src = self.sources();
        (0..max).take_while(|&t| src.base_at(a, t) == src.base_at(b, t)).count()
    }

    fn verify(&self, a: Base, b: Base, max: usize, got: usize) -> usize {
        if !self.backend.paranoid {
            return got;
        }
        let scanned = self.scan(a, b, max);
        if scanned != got {
            self.detections.set(self.detections.get() + 1);
        }
        scanned
    }

    /// Gallops over `len = first + j * tau`, where the text side lands on a
    /// sample, then finishes with direct reads.
    fn gallop(
        &self,
        text_pos: usize,
        max: usize,
        other_at: impl Fn(usize) -> Symbol,
        equal_len: impl Fn(usize) -> bool,
    ) -> usize {
        let t = self.text.symbols();
        let tau = self.backend.prefixes.tau();
        let first = (tau - text_pos % tau) % tau;
        let head = first.min(max);
        for d in 0..head {
            if t[text_pos + d] != other_at(d) {
                return d;
            }
        }
        if head == max {
            return max;
        }
        let blocks = (max - first) / tau;
        // Largest j in [0, blocks] with equal_len(first + j * tau); j = 0 holds.
        let mut lo = 0usize;
        let mut step = 1usize;
        let mut hi = blocks + 1;
        while lo + step <= blocks {
            if equal_len(first + (lo + step) * tau) {
                lo += step;
                step *= 2;
            } else {
                hi = lo + step;
                break;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if mid > blocks || !equal_len(first + mid * tau) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let start = first + lo * tau;
        let end = (start + tau).min(max);
        for d in start..end {
            if t[text_pos + d] != other_at(d) {
                return d;
            }
        }
        end
    }

    fn text_query_fp(&self, i: usize, j: usize, max: usize) -> usize {
        let t = self.text.symbols();
        let pre = &self.backend.prefixes;
        let hi = pre.prefix(t, i);
        let q = self.query;
        self.gallop(
            i,
            max,
            |d| q[j + d],
            |len| {
                let ht = sub(pre.prefix(t, i + len), mul(hi, self.q_pow[len]));
                let hq = sub(self.q_prefix[j + len], mul(self.q_prefix[j], self.q_pow[len]));
                ht == hq
            },
        )
    }

    fn text_text_fp(&self, i: usize, j: usize, max: usize) -> usize {
        let t = self.text.symbols();
        let pre = &self.backend.prefixes;
        let hi = pre.prefix(t, i);
        let hj = pre.prefix(t, j);
        self.gallop(
            i,
            max,
            |d| t[j + d],
            |len| {
                let bl = pow(pre.base(), len as u64);
                let a = sub(pre.prefix(t, i + len), mul(hi, bl));
                let b = sub(pre.prefix(t, j + len), mul(hj, bl));
                a == b
            },
        )
    }

    /// The first `limit` mismatch positions of two altered strings, found by
    /// alternating raw LCP jumps with single-character checks at alteration
    /// offsets.
    pub fn first_mismatches(&self, a: AlteredRef<'_>, b: AlteredRef<'_>, limit: usize) -> Mismatches {
        let src = self.sources();
        let overlap = src.len(a).min(src.len(b));
        let mut positions = SmallVec::new();
        let (mut ia, mut ib) = (0usize, 0usize);
        let mut pos = 0usize;
        while positions.len() < limit && pos < overlap {
            while ia < a.alts.len() && (a.alts[ia].offset as usize) < pos {
                ia += 1;
            }
            while ib < b.alts.len() && (b.alts[ib].offset as usize) < pos {
                ib += 1;
            }
            let next_a = a.alts.get(ia).map_or(usize::MAX, |x| x.offset as usize);
            let next_b = b.alts.get(ib).map_or(usize::MAX, |x| x.offset as usize);
            let event = next_a.min(next_b).min(overlap);
            if pos < event {
                pos += self.raw_lcp(a.base.shifted(pos), b.base.shifted(pos), event - pos);
                if pos < event {
                    positions.push(pos as u32);
                    pos += 1;
                    continue;
                }
            }
            if pos == overlap {
                break;
            }
            if src.at(a, pos) != src.at(b, pos) {
                positions.push(pos as u32);
            }
            pos += 1;
        }
        let exhausted = positions.len() < limit;
        Mismatches { positions, exhausted, overlap }
    }

    /// LCP of two altered strings.
    pub fn lcp_altered(&self, a: AlteredRef<'_>, b: AlteredRef<'_>) -> usize {
        let m = self.first_mismatches(a, b, 1);
        m.positions.first().map_or(m.overlap, |&p| p as usize)
    }

    /// `Some(distance)` when the generalized Hamming distance is at most `r`.
    pub fn within_distance(&self, a: AlteredRef<'_>, b: AlteredRef<'_>, r: usize) -> Option<usize> {
        let m = self.first_mismatches(a, b, r + 1);
        (m.positions.len() <= r).then_some(m.positions.len())
    }

    /// Lexicographic comparison plus the LCP. A proper prefix sorts first.
    pub fn compare(&self, a: AlteredRef<'_>, b: AlteredRef<'_>) -> (Ordering, usize) {
        let src = self.sources();
        let lcp = self.lcp_altered(a, b);
        let (la, lb) = (src.len(a), src.len(b));
        if lcp == la.min(lb) {
            (la.cmp(&lb), lcp)
        } else {
            (src.at(a, lcp).cmp(&src.at(b, lcp)), lcp)
        }
    }
}
