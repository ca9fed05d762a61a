//! Karp-Rabin fingerprints over the Mersenne prime field `2^61 - 1`.

use crate::text::Symbol;

pub const MODULUS: u64 = (1 << 61) - 1;

#[inline]
pub fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & MODULUS;
    let hi = (x >> 61) as u64;
    let s = lo + hi;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

pub fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    acc
}

#[inline]
pub fn encode(c: Symbol) -> u64 {
    c as u64 + 1
}

/// `H[i] = sum s[t] * B^(i-1-t)` for `t < i`, fully materialized.
pub fn full_prefixes(s: &[Symbol], base: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(s.len() + 1);
    let mut h = 0u64;
    out.push(h);
    for &c in s {
        h = add(mul(h, base), encode(c));
        out.push(h);
    }
    out
}

/// Prefix fingerprints of a text kept only at positions `0, tau, 2tau, ...` and
/// at the text end.
#[derive(Clone, Debug)]
pub struct SampledPrefixes {
    tau: usize,
    base: u64,
    len: usize,
    samples: Vec<u64>,
}

impl SampledPrefixes {
    pub fn build(s: &[Symbol], tau: usize, base: u64) -> Self {
        assert!(tau >= 1);
        let mut samples = Vec::with_capacity(s.len() / tau + 2);
        let mut h = 0u64;
        samples.push(h);
        for (i, &c) in s.iter().enumerate() {
            h = add(mul(h, base), encode(c));
            if (i + 1) % tau == 0 {
                samples.push(h);
            }
        }
        if s.len() % tau != 0 {
            samples.push(h);
        }
        SampledPrefixes { tau, base, len: s.len(), samples }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Number of stored fingerprints, `ceil(len / tau) + 1`.
    pub fn stored(&self) -> usize {
        self.samples.len()
    }

    /// Whether `H[pos]` is stored directly.
    #[inline]
    pub fn is_sampled(&self, pos: usize) -> bool {
        pos % self.tau == 0 || pos == self.len
    }

    /// `H[pos]`, rebuilt from the nearest sample at or before `pos` with fewer
    /// than `tau` reads of `s`.
    #[inline]
    pub fn prefix(&self, s: &[Symbol], pos: usize) -> u64 {
        if pos == self.len {
            return *self.samples.last().unwrap();
        }
        let blk = pos / self.tau;
        let mut h = self.samples[blk];
        for &c in &s[blk * self.tau..pos] {
            h = add(mul(h, self.base), encode(c));
        }
        h
    }

    /// Fingerprint of `s[from..to]` given `H[from]`.
    #[inline]
    pub fn range(&self, s: &[Symbol], h_from: u64, from: usize, to: usize) -> u64 {
        sub(self.prefix(s, to), mul(h_from, pow(self.base, (to - from) as u64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arithmetic() {
        assert_eq!(mul(MODULUS - 1, MODULUS - 1), 1);
        assert_eq!(add(MODULUS - 1, 1), 0);
        assert_eq!(sub(0, 1), MODULUS - 1);
        assert_eq!(pow(3, 0), 1);
        assert_eq!(pow(3, 5), 243);
        let b = 123_456_789_012_345;
        assert_eq!(pow(b, MODULUS - 1), 1);
    }

    #[test]
    fn sampled_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s: Vec<Symbol> = (0..97).map(|_| rng.gen_range(0..4)).collect();
        let base = 1_000_003;
        let full = full_prefixes(&s, base);
        for tau in [1, 2, 3, 8, 97, 200] {
            let sp = SampledPrefixes::build(&s, tau, base);
            assert_eq!(sp.stored(), s.len().div_ceil(tau) + 1);
            for pos in 0..=s.len() {
                assert_eq!(sp.prefix(&s, pos), full[pos], "tau {tau} pos {pos}");
            }
            for from in 0..s.len() {
                let h = sp.prefix(&s, from);
                for to in from..=s.len() {
                    let want = sub(full[to], mul(full[from], pow(base, (to - from) as u64)));
                    assert_eq!(sp.range(&s, h, from, to), want);
                }
            }
        }
    }
}
