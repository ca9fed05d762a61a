//! Seeded random queries drawn from a text.

use mismatch_index::Symbol;
use rand::Rng;

/// A substring of `raw` of length in `1..=max_len` with up to `k` positions
/// overwritten by symbols already present in the text, and a radius in `0..=k`.
pub fn random_query(raw: &[Symbol], k: usize, max_len: usize, rng: &mut impl Rng) -> (Vec<Symbol>, usize) {
    let n = raw.len();
    let len = rng.gen_range(1..=max_len.min(n));
    let start = rng.gen_range(0..=n - len);
    let mut q = raw[start..start + len].to_vec();
    for _ in 0..rng.gen_range(0..=k) {
        let at = rng.gen_range(0..len);
        q[at] = raw[rng.gen_range(0..n)];
    }
    (q, rng.gen_range(0..=k))
}
