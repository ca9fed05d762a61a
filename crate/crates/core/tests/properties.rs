use mismatch_index::lcp::{LcpBackend, QueryContext};
use mismatch_index::oracle::properties::{observation_case, pivot_alter_case, sentinel_case, Branch, Fixture};
use mismatch_index::text::{lcp_naive, pad_text, Base, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn distance_reduction_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for branch in Branch::ALL {
        for round in 0..20 {
            let fx = Fixture::random(rng.gen_range(40..400), 2, [2, 4, 26][round % 3], [1, 4][round % 2], &mut rng);
            for _ in 0..500 {
                observation_case(&fx, branch, &mut rng).unwrap();
            }
        }
    }
}

#[test]
fn pivot_alteration_agrees_with_pivot() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut done = 0;
    for round in 0..100 {
        let fx = Fixture::random(rng.gen_range(20..300), 2, [2, 4][round % 2], [1, 8][round % 2], &mut rng);
        for _ in 0..1000 {
            done += pivot_alter_case(&fx, 2, &mut rng).unwrap() as usize;
        }
    }
    assert!(done > 90_000, "{done}");
}

#[test]
fn padded_suffixes_stay_prefix_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for round in 0..50 {
        let k = 1 + round % 3;
        let fx = Fixture::random(rng.gen_range(64..300), k, 2, 1, &mut rng);
        for _ in 0..1000 {
            sentinel_case(&fx, k, &mut rng).unwrap();
        }
    }
}

#[test]
fn fingerprint_lcps_match_scans() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let raw: Vec<Symbol> = (0..3000).map(|_| rng.gen_range(0..2)).collect();
    let text = pad_text(&raw, 2).unwrap();
    for seed in [1u64, 2] {
        for tau in [2, 8] {
            let be = LcpBackend::sampled(&text, tau, seed, false);
            for _ in 0..250 {
                let start = rng.gen_range(0..2900);
                let mut q = raw[start..start + 100].to_vec();
                q[rng.gen_range(0..100)] ^= 1;
                let ctx = QueryContext::new(&text, &be, &q).unwrap();
                for _ in 0..1000 {
                    let i = rng.gen_range(0..text.n());
                    let j = rng.gen_range(0..q.len());
                    let want = lcp_naive(text.suffix(i), &q[j..]);
                    assert_eq!(ctx.lcp(Base::Text(i as u32), Base::Query(j as u32)), want);
                    let i2 = rng.gen_range(0..text.n());
                    assert_eq!(ctx.lcp(Base::Text(i as u32), Base::Text(i2 as u32)), lcp_naive(text.suffix(i), text.suffix(i2)));
                }
                assert_eq!(ctx.detections(), 0);
            }
        }
    }
}
