//! Randomized single-case checks for the distance identities, pivot
//! alteration and sentinel padding. Each case returns `Err` with a witness on
//! violation; callers loop as many times as they like.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lcp::{LcpBackend, QueryContext};
use crate::text::{hamming_naive, lcp_naive, materialize, pad_text, pivot_alter, Alteration, AlteredString, PaddedText, Symbol};

/// A random padded text with its LCP backend.
pub struct Fixture {
    text: PaddedText,
    backend: LcpBackend,
    alpha: u32,
}

impl Fixture {
    /// `tau = 1` selects the exact backend.
    pub fn random(n: usize, k: usize, alpha: u32, tau: usize, rng: &mut impl Rng) -> Fixture {
        let raw: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..alpha)).collect();
        let text = pad_text(&raw, k).expect("fixture parameters are valid");
        let seed = rng.gen();
        let backend = if tau == 1 {
            LcpBackend::exact(&text, seed, false)
        } else {
            LcpBackend::sampled(&text, tau, seed, false)
        };
        Fixture { text, backend, alpha }
    }

    pub fn text(&self) -> &PaddedText {
        &self.text
    }

    pub fn backend(&self) -> &LcpBackend {
        &self.backend
    }

    /// A symbol from the alphabet or one fresh symbol beyond it.
    fn symbol(&self, rng: &mut impl Rng) -> Symbol {
        rng.gen_range(0..=self.alpha)
    }
}

/// Which case of the distance-reduction identities a trial exercises.
/// `i = lcp(q, p)` and `j = lcp(s, p)` for a query `q` and distinct suffixes
/// `s`, `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `i < j`: `d(q^, s) = d(q, s) - 1`.
    QueryAltered,
    /// `i > j`: `d(q, s^) = d(q, s) - 1`.
    SuffixAltered,
    /// `i = j`, `q[i] != s[j]`: `d(q^, s^) = d(q, s) - 1`.
    BothAltered,
    /// `i = |q| <= j`: `d(q, s) = 0`.
    QueryInPivot,
    /// `i = |q| > j`: `d(q, s^) = d(q, s) - 1`.
    QueryInPivotSuffixAltered,
}

impl Branch {
    pub const ALL: [Branch; 5] = [
        Branch::QueryAltered,
        Branch::SuffixAltered,
        Branch::BothAltered,
        Branch::QueryInPivot,
        Branch::QueryInPivotSuffixAltered,
    ];
}

const ATTEMPTS: usize = 10_000;

/// Picks distinct `(s, p)` whose LCP satisfies `ok(j, text length of p)`.
fn pick_pair(fx: &Fixture, rng: &mut impl Rng, ok: impl Fn(usize, usize) -> bool) -> Result<(usize, usize, usize), String> {
    let n = fx.text.n();
    for _ in 0..ATTEMPTS {
        let s = rng.gen_range(0..n);
        let p = rng.gen_range(0..n);
        if s == p {
            continue;
        }
        let j = lcp_naive(fx.text.suffix(s), fx.text.suffix(p));
        if ok(j, n - p) {
            return Ok((s, p, j));
        }
    }
    Err("no suffix pair satisfies the branch precondition".into())
}

/// One random trial of `branch`.
pub fn observation_case(fx: &Fixture, branch: Branch, rng: &mut impl Rng) -> Result<(), String> {
    let text = &fx.text;
    let (s, p, j) = match branch {
        Branch::QueryAltered | Branch::QueryInPivot => pick_pair(fx, rng, |j, _| j >= 1)?,
        Branch::SuffixAltered | Branch::QueryInPivotSuffixAltered => pick_pair(fx, rng, |j, avail| j < avail)?,
        Branch::BothAltered => pick_pair(fx, rng, |_, _| true)?,
    };
    let ps = text.suffix(p);
    let ss = text.suffix(s);
    let avail = text.n() - p;
    // Target i and whether q stops right after the shared prefix.
    let (i, exhausted) = match branch {
        Branch::QueryAltered => (rng.gen_range(0..j), false),
        Branch::SuffixAltered => (rng.gen_range(j + 1..=avail.min(j + 8)), false),
        Branch::BothAltered => (j, false),
        Branch::QueryInPivot => (rng.gen_range(1..=j), true),
        Branch::QueryInPivotSuffixAltered => (rng.gen_range(j + 1..=avail.min(j + 8)), true),
    };
    let mut q: Vec<Symbol> = ps[..i].to_vec();
    if !exhausted {
        let x = loop {
            let x = fx.symbol(rng);
            if x != ps[i] && (branch != Branch::BothAltered || x != ss[j]) {
                break x;
            }
        };
        q.push(x);
        let room = ss.len().min(ps.len()).saturating_sub(q.len());
        for _ in 0..rng.gen_range(0..=room.min(8)) {
            q.push(fx.symbol(rng));
        }
    }
    let ctx = QueryContext::new(text, &fx.backend, &q).map_err(|e| e.to_string())?;
    let src = ctx.sources();
    let qa = AlteredString::query();
    let pa = AlteredString::text_suffix(p);
    let sa = AlteredString::text_suffix(s);
    let witness = || format!("{branch:?}: q={q:?} s={s} p={p} i={i} j={j}");

    let got_i = ctx.lcp_altered(qa.as_ref(), pa.as_ref());
    let got_j = ctx.lcp_altered(sa.as_ref(), pa.as_ref());
    if got_i != i || got_j != j {
        return Err(format!("{}: lcp computed as ({got_i}, {got_j})", witness()));
    }
    let dist = |a: &AlteredString, b: &AlteredString| -> Result<usize, String> {
        let ma = materialize(a.as_ref(), text, Some(&q)).map_err(|e| e.to_string())?;
        let mb = materialize(b.as_ref(), text, Some(&q)).map_err(|e| e.to_string())?;
        let naive = hamming_naive(&ma, &mb);
        let fast = ctx.within_distance(a.as_ref(), b.as_ref(), ma.len().max(mb.len()));
        if fast != Some(naive) {
            return Err(format!("{}: distance {fast:?} vs scan {naive}", witness()));
        }
        Ok(naive)
    };
    let alter = |a: &AlteredString, lcp: usize| pivot_alter(a.as_ref(), lcp, pa.as_ref(), &src).map_err(|e| format!("{}: {e}", witness()));

    let d = dist(&qa, &sa)?;
    let (lhs, want) = match branch {
        Branch::QueryAltered => (dist(&alter(&qa, i)?, &sa)?, d.checked_sub(1)),
        Branch::SuffixAltered | Branch::QueryInPivotSuffixAltered => (dist(&qa, &alter(&sa, j)?)?, d.checked_sub(1)),
        Branch::BothAltered => (dist(&alter(&qa, i)?, &alter(&sa, j)?)?, d.checked_sub(1)),
        Branch::QueryInPivot => (d, Some(0)),
    };
    if Some(lhs) != want {
        return Err(format!("{}: d(q, s) = {d}, reduced distance {lhs}", witness()));
    }
    Ok(())
}

/// Up to `k` alterations with strictly increasing offsets, each changing the
/// character it covers. Offsets stay below `limit`.
fn random_alterations(
    fx: &Fixture,
    base: &[Symbol],
    limit: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Vec<Alteration> {
    let mut offsets: Vec<usize> = (0..rng.gen_range(0..=k)).map(|_| rng.gen_range(0..limit)).collect();
    offsets.sort_unstable();
    offsets.dedup();
    offsets
        .into_iter()
        .map(|o| {
            let sym = loop {
                let c = fx.symbol(rng);
                if c != base[o] {
                    break c;
                }
            };
            Alteration::new(o, sym)
        })
        .collect()
}

/// Pivot alteration makes `s` agree with `p` on positions `0..=lcp`.
/// Returns `Ok(false)` when the LCP runs to the end of one string and there is
/// nothing to alter.
pub fn pivot_alter_case(fx: &Fixture, k: usize, rng: &mut impl Rng) -> Result<bool, String> {
    let text = &fx.text;
    let n = text.n();
    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let (sa, sb) = (text.suffix(a), text.suffix(b));
    let s = AlteredString::with_alterations(AlteredString::text_suffix(a).base, random_alterations(fx, sa, sa.len(), k, rng));
    let p = AlteredString::with_alterations(AlteredString::text_suffix(b).base, random_alterations(fx, sb, sb.len(), k, rng));
    let ctx = QueryContext::for_text(text, &fx.backend);
    let ms = materialize(s.as_ref(), text, None).map_err(|e| e.to_string())?;
    let mp = materialize(p.as_ref(), text, None).map_err(|e| e.to_string())?;
    let lcp = ctx.lcp_altered(s.as_ref(), p.as_ref());
    if lcp != lcp_naive(&ms, &mp) {
        return Err(format!("s={s:?} p={p:?}: lcp {lcp} vs scan {}", lcp_naive(&ms, &mp)));
    }
    let Ok(hat) = pivot_alter(s.as_ref(), lcp, p.as_ref(), &ctx.sources()) else {
        return Ok(false);
    };
    let mh = materialize(hat.as_ref(), text, None).map_err(|e| e.to_string())?;
    if !hat.as_ref().is_canonical() || mh[..=lcp] != mp[..=lcp] {
        return Err(format!("s={s:?} p={p:?}: altered {hat:?} disagrees with the pivot within {lcp}"));
    }
    Ok(true)
}

/// Two distinct suffixes, each with up to `k` alterations inside the text
/// part, never become prefixes of one another, and the comparator never calls
/// them equal.
pub fn sentinel_case(fx: &Fixture, k: usize, rng: &mut impl Rng) -> Result<(), String> {
    let text = &fx.text;
    let n = text.n();
    let a = rng.gen_range(0..n);
    let b = loop {
        let b = rng.gen_range(0..n);
        if b != a {
            break b;
        }
    };
    let s = AlteredString::with_alterations(
        AlteredString::text_suffix(a).base,
        random_alterations(fx, text.suffix(a), n - a, k, rng),
    );
    let t = AlteredString::with_alterations(
        AlteredString::text_suffix(b).base,
        random_alterations(fx, text.suffix(b), n - b, k, rng),
    );
    let ms = materialize(s.as_ref(), text, None).map_err(|e| e.to_string())?;
    let mt = materialize(t.as_ref(), text, None).map_err(|e| e.to_string())?;
    if lcp_naive(&ms, &mt) >= ms.len().min(mt.len()) {
        return Err(format!("{s:?} and {t:?} are prefix-related"));
    }
    let ctx = QueryContext::for_text(text, &fx.backend);
    let (ord, _) = ctx.compare(s.as_ref(), t.as_ref());
    if ord == Ordering::Equal || ord != ms.cmp(&mt) {
        return Err(format!("{s:?} vs {t:?}: comparator says {ord:?}, scan says {:?}", ms.cmp(&mt)));
    }
    Ok(())
}

/// A random function on `[0, n)` as a table: elements are grouped in runs of
/// `1..=sigma` in random order, each group maps to its own image in `[0, n)`
/// and about one group in ten maps to `None`.
pub fn bounded_indegree_table(n: u32, sigma: u32, rng: &mut impl Rng) -> Vec<Option<u32>> {
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut images: Vec<u32> = (0..n).collect();
    images.shuffle(rng);
    let mut table = vec![None; n as usize];
    let (mut at, mut group) = (0usize, 0usize);
    while at < order.len() {
        let size = rng.gen_range(1..=sigma as usize).min(order.len() - at);
        let j = (!rng.gen_bool(0.1)).then_some(images[group]);
        for &i in &order[at..at + size] {
            table[i as usize] = j;
        }
        at += size;
        group += 1;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_branch_is_reachable() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for alpha in [2, 4] {
            let fx = Fixture::random(200, 2, alpha, 1, &mut rng);
            for b in Branch::ALL {
                for _ in 0..300 {
                    observation_case(&fx, b, &mut rng).unwrap();
                }
            }
        }
    }

    #[test]
    fn pivot_and_sentinel_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let fx = Fixture::random(150, 3, 3, 4, &mut rng);
        let mut altered = 0;
        for _ in 0..2000 {
            altered += pivot_alter_case(&fx, 3, &mut rng).unwrap() as usize;
            sentinel_case(&fx, 3, &mut rng).unwrap();
        }
        assert!(altered > 1000);
    }

    #[test]
    fn bounded_tables_respect_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for sigma in [1, 4, 16] {
            let t = bounded_indegree_table(500, sigma, &mut rng);
            let mut counts = std::collections::BTreeMap::<u32, u32>::new();
            for j in t.iter().flatten() {
                *counts.entry(*j).or_default() += 1;
            }
            assert!(counts.values().all(|&c| c <= sigma));
            assert!(t.iter().any(Option::is_none));
        }
    }
}
