//! Seeded workloads for the criterion benchmarks.

use mismatch_index::Symbol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform text over `alpha` symbols.
pub fn random_text(n: usize, alpha: u32, seed: u64) -> Vec<Symbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..alpha)).collect()
}

/// Substrings of length `len` with exactly `mismatches` positions changed.
pub fn perturbed_queries(text: &[Symbol], len: usize, mismatches: usize, count: usize, seed: u64) -> Vec<Vec<Symbol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = len.min(text.len());
    (0..count)
        .map(|_| {
            let start = rng.gen_range(0..=text.len() - len);
            let mut q = text[start..start + len].to_vec();
            for _ in 0..mismatches {
                let at = rng.gen_range(0..len);
                q[at] = q[at].wrapping_add(1);
            }
            q
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(random_text(50, 4, 1), random_text(50, 4, 1));
        let t = random_text(100, 4, 2);
        let qs = perturbed_queries(&t, 10, 1, 5, 3);
        assert_eq!(qs.len(), 5);
        assert!(qs.iter().all(|q| q.len() == 10));
    }
}
