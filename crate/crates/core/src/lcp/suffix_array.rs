//! Prefix-doubling suffix array and Kasai LCP array.

use crate::text::Symbol;

/// Suffix array of `s` by prefix doubling.
pub fn suffix_array(s: &[Symbol]) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    // Compress the alphabet so ranks stay dense.
    let mut alphabet: Vec<Symbol> = s.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut rank: Vec<u32> = s
        .iter()
        .map(|c| alphabet.binary_search(c).unwrap() as u32 + 1)
        .collect();
    let mut tmp = vec![0u32; n];
    let mut h = 1usize;
    loop {
        let key = |i: u32| {
            let i = i as usize;
            let second = if i + h < n { rank[i + h] } else { 0 };
            ((rank[i] as u64) << 32) | second as u64
        };
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0] as usize] = 1;
        for w in 1..n {
            let bump = (key(sa[w - 1]) != key(sa[w])) as u32;
            tmp[sa[w] as usize] = tmp[sa[w - 1] as usize] + bump;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1] as usize] as usize == n {
            break;
        }
        h *= 2;
    }
    sa
}

/// Inverse permutation of `sa`.
pub fn ranks(sa: &[u32]) -> Vec<u32> {
    let mut r = vec![0u32; sa.len()];
    for (i, &p) in sa.iter().enumerate() {
        r[p as usize] = i as u32;
    }
    r
}

/// `lcp[r]` = LCP of the suffixes at ranks `r - 1` and `r`; `lcp[0] = 0`.
pub fn kasai(s: &[Symbol], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::lcp_naive;

    fn naive_sa(s: &[Symbol]) -> Vec<u32> {
        let mut sa: Vec<u32> = (0..s.len() as u32).collect();
        sa.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
        sa
    }

    #[test]
    fn banana() {
        let s: Vec<Symbol> = b"BANANA".iter().map(|&c| c as Symbol).collect();
        let sa = suffix_array(&s);
        assert_eq!(sa, vec![5, 3, 1, 0, 4, 2]);
        let lcp = kasai(&s, &sa, &ranks(&sa));
        assert_eq!(lcp, vec![0, 1, 3, 0, 0, 2]);
    }

    #[test]
    fn matches_naive() {
        let mut state = 12345u64;
        for len in [1, 2, 5, 40, 333] {
            for sigma in [1u32, 2, 3, 26] {
                let s: Vec<Symbol> = (0..len)
                    .map(|_| {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        ((state >> 33) as u32) % sigma
                    })
                    .chain([u32::MAX, u32::MAX])
                    .collect();
                let sa = suffix_array(&s);
                assert_eq!(sa, naive_sa(&s));
                let lcp = kasai(&s, &sa, &ranks(&sa));
                for r in 1..s.len() {
                    let want = lcp_naive(&s[sa[r - 1] as usize..], &s[sa[r] as usize..]);
                    assert_eq!(lcp[r] as usize, want);
                }
            }
        }
    }
}
