//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. `ACCEPTANCE_ONLY=<name>[,<name>]` runs a subset.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use mismatch_index::dictionary::{dictionary_transform, MAX_ENTRY_LEN};
use mismatch_index::fninv::{InversionIndex, InversionParams};
use mismatch_index::oracle::properties::{
    bounded_indegree_table, observation_case, pivot_alter_case, sentinel_case, Branch, Fixture,
};
use mismatch_index::oracle::{brute_force_preimage, brute_force_query, walk_index};
use mismatch_index::text::hamming_naive;
use mismatch_index::{max_k, BuildParams, DictionaryIndex, EntryMatch, Match, MismatchIndex, Mode, Symbol};
use mismatch_index_cli::persist;
use mismatch_index_cli::sweep::{self, visited_bound, SweepConfig};
use mismatch_index_cli::workload::random_query;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    summary: String,
}

fn log_uniform(rng: &mut impl Rng, lo: usize, hi: usize) -> usize {
    let x = rng.gen_range((lo as f64).ln()..=(hi as f64).ln());
    (x.exp().round() as usize).clamp(lo, hi)
}

fn random_text(rng: &mut impl Rng, n: usize, alpha: u32) -> Vec<Symbol> {
    (0..n).map(|_| rng.gen_range(0..alpha)).collect()
}

/// Mostly perturbed substrings of the text, sometimes uniform noise.
fn pick_query(rng: &mut impl Rng, raw: &[Symbol], k: usize, alpha: u32) -> (Vec<Symbol>, usize) {
    if rng.gen_bool(0.8) {
        random_query(raw, k, 40, rng)
    } else {
        let len = rng.gen_range(1..=12);
        ((0..len).map(|_| rng.gen_range(0..alpha)).collect(), rng.gen_range(0..=k))
    }
}

/// Results shared by the equivalence sweeps and the criteria that audit them.
#[derive(Default)]
struct Sweep {
    instances: usize,
    queries: usize,
    mismatches: Vec<String>,
    trees: usize,
    trees_with_exhaustive_f: usize,
    violations: Vec<String>,
    counter_checks: usize,
    counter_violations: Vec<String>,
    worst_counter_ratio: f64,
    duplicates: Vec<String>,
    detections: u64,
}

impl Sweep {
    fn absorb(&mut self, other: Sweep) {
        self.instances += other.instances;
        self.queries += other.queries;
        self.mismatches.extend(other.mismatches);
        self.trees += other.trees;
        self.trees_with_exhaustive_f += other.trees_with_exhaustive_f;
        self.violations.extend(other.violations);
        self.counter_checks += other.counter_checks;
        self.counter_violations.extend(other.counter_violations);
        self.worst_counter_ratio = self.worst_counter_ratio.max(other.worst_counter_ratio);
        self.duplicates.extend(other.duplicates);
        self.detections += other.detections;
    }
}

/// Budget of `eval_f` calls for the exhaustive preimage check on one tree.
const EXHAUSTIVE_F_BUDGET: usize = 400_000;

fn equivalence_sweep(instances: usize, succinct: bool, seed: u64) -> Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Sweep::default();
    for inst in 0..instances {
        let n = log_uniform(&mut rng, 16, 5000);
        let alpha = [2, 4, 26][rng.gen_range(0..3)];
        let k = rng.gen_range(1..=3).min(max_k(n));
        let sigma = [1, 2, 8, 32][rng.gen_range(0..4)];
        let raw = random_text(&mut rng, n, alpha);
        let mut params = BuildParams::new(k, sigma).seed(rng.gen()).audit(true);
        if succinct {
            let tau = [2, 8][rng.gen_range(0..2)];
            params = params.mode(Mode::Succinct { tau }).paranoid(true);
        }
        let tag = format!("instance {inst} (n={n} |alphabet|={alpha} k={k} sigma={sigma} mode={:?})", params.mode);
        let index = MismatchIndex::build(&raw, params).expect("valid parameters");
        out.instances += 1;

        let rep = index.report();
        let exhaustive = n * rep.labels() <= EXHAUSTIVE_F_BUDGET;
        out.trees += 1;
        out.trees_with_exhaustive_f += exhaustive as usize;
        out.violations.extend(walk_index(&index, exhaustive).iter().map(|v| format!("{tag}: {v}")));

        let (q, r) = pick_query(&mut rng, &raw, k, alpha);
        let (got, qr) = index.query_with_report(&q, r).expect("valid query");
        let want = brute_force_query(index.text(), &q, r);
        out.queries += 1;
        out.detections += qr.detections;
        if got != want {
            out.mismatches.push(format!("{tag}: q={q:?} r={r}: {} results, scan has {}", got.len(), want.len()));
        }
        if got.windows(2).any(|w| w[0].position >= w[1].position) {
            out.duplicates.push(format!("{tag}: q={q:?} r={r}"));
        }
        let bound = visited_bound(n, k);
        out.counter_checks += 1;
        out.worst_counter_ratio = out.worst_counter_ratio.max(qr.stats.visited_positive as f64 / bound as f64);
        if qr.stats.visited_positive > bound {
            out.counter_violations.push(format!("{tag}: visited {} > {bound}", qr.stats.visited_positive));
        }
    }
    out
}

fn first(v: &[String]) -> String {
    v.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

fn linear_equivalence(sweep: &Sweep) -> Outcome {
    Outcome {
        pass: sweep.mismatches.is_empty() && sweep.instances == 2000,
        summary: format!(
            "{} instances, {} mismatches against the scan{}",
            sweep.instances,
            sweep.mismatches.len(),
            first(&sweep.mismatches)
        ),
    }
}

fn succinct_equivalence(sweep: &Sweep) -> Outcome {
    Outcome {
        pass: sweep.mismatches.is_empty() && sweep.instances == 500,
        summary: format!(
            "{} instances (tau in {{2, 8}}, paranoid), {} mismatches, {} fingerprint disagreements caught{}",
            sweep.instances,
            sweep.mismatches.len(),
            sweep.detections,
            first(&sweep.mismatches)
        ),
    }
}

fn inversion_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1);
    let mut failures = Vec::new();
    let (mut functions, mut images, mut preimages) = (0usize, 0u64, 0u64);
    let mut missing_by_cap: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for t in 0..200 {
        let sigma = [1u32, 4, 16][t % 3];
        let cap = [Some(0), Some(4), None][(t / 3) % 3];
        let n = log_uniform(&mut rng, 8, 4096) as u32;
        let table = bounded_indegree_table(n, sigma, &mut rng);
        let f = |i: u32| table[i as usize];
        let params = InversionParams::new(n, sigma, cap, rng.gen());
        let index = InversionIndex::build(&f, params);
        functions += 1;
        let e = missing_by_cap.entry(format!("{cap:?}")).or_default();
        e.0 += index.missing_entries();
        e.1 += table.iter().flatten().count();
        for j in 0..n {
            let got = index.invert(&f, Some(j)).expect("j is defined");
            images += 1;
            preimages += got.len() as u64;
            if got != brute_force_preimage(&f, n, j) {
                failures.push(format!("function {t} (n={n} sigma={sigma} cap={cap:?}) j={j}: {got:?}"));
            }
        }
    }
    let missing: Vec<String> = missing_by_cap
        .iter()
        .map(|(cap, (m, total))| format!("cap {cap}: {m}/{total} stored as missing"))
        .collect();
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "{functions} functions, {images} images inverted ({preimages} preimage elements), {} wrong [{}]{}",
            failures.len(),
            missing.join(", "),
            first(&failures)
        ),
    }
}

fn structural(sweep: &Sweep) -> Outcome {
    Outcome {
        pass: sweep.violations.is_empty(),
        summary: format!(
            "{} trees audited ({} with every f_lambda evaluated on all of [n]), {} violations{}",
            sweep.trees,
            sweep.trees_with_exhaustive_f,
            sweep.violations.len(),
            first(&sweep.violations)
        ),
    }
}

fn subtree_counter(sweep: &Sweep) -> Outcome {
    Outcome {
        pass: sweep.counter_violations.is_empty(),
        summary: format!(
            "{} queries, {} over 3^k*C(ceil(log2 n)+1, k), largest ratio {:.3}{}",
            sweep.counter_checks,
            sweep.counter_violations.len(),
            sweep.worst_counter_ratio,
            first(&sweep.counter_violations)
        ),
    }
}

fn observations() -> Outcome {
    const PER_BRANCH: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B5);
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for branch in Branch::ALL {
        let mut done = 0;
        while done < PER_BRANCH {
            let n = rng.gen_range(32..400);
            let fx = Fixture::random(n, rng.gen_range(1..=3).min(max_k(n)), [2, 4, 26][rng.gen_range(0..3)], [1, 4][rng.gen_range(0..2)], &mut rng);
            for _ in 0..1000 {
                if let Err(e) = observation_case(&fx, branch, &mut rng) {
                    failures.push(e);
                }
                done += 1;
            }
        }
        counts.push(format!("{branch:?} {done}"));
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("{} trials per branch [{}], {} violations{}", PER_BRANCH, counts.join(", "), failures.len(), first(&failures)),
    }
}

fn alteration_and_padding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA17);
    let mut failures = Vec::new();
    let (mut altered, mut sentinel) = (0usize, 0usize);
    for round in 0..100 {
        let n = rng.gen_range(16..400);
        let k = (1 + round % 3).min(max_k(n));
        let fx = Fixture::random(n, k, [2, 4][round % 2], [1, 8][round % 2], &mut rng);
        for _ in 0..1000 {
            match pivot_alter_case(&fx, k, &mut rng) {
                Ok(a) => altered += a as usize,
                Err(e) => failures.push(e),
            }
            if let Err(e) = sentinel_case(&fx, k, &mut rng) {
                failures.push(e);
            }
            sentinel += 1;
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "pivot alteration {altered} altered pairs of 100000, padding {sentinel} suffix pairs, {} violations{}",
            failures.len(),
            first(&failures)
        ),
    }
}

fn no_duplicates(sweep: &Sweep) -> Outcome {
    Outcome {
        pass: sweep.duplicates.is_empty() && cfg!(debug_assertions),
        summary: format!(
            "{} queries, {} with repeated positions, debug assertions {}{}",
            sweep.queries,
            sweep.duplicates.len(),
            if cfg!(debug_assertions) { "on" } else { "OFF" },
            first(&sweep.duplicates)
        ),
    }
}

fn space_trend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ACE);
    let raw = random_text(&mut rng, 10_000, 4);
    let cfg = SweepConfig {
        ks: vec![2],
        sigmas: vec![1, 2, 4, 8, 16, 32, 64],
        mode: Mode::Linear,
        queries: 20,
        max_query_len: 32,
        seed: 7,
    };
    let report = sweep::run(&raw, &cfg).expect("valid sweep");
    let bytes: Vec<usize> = report.rows.iter().map(|r| r.tree_bytes).collect();
    let per_label: Vec<u32> = report.rows.iter().map(|r| r.max_leaves_per_label).collect();
    let mut failures = Vec::new();
    if bytes.windows(2).any(|w| w[1] > w[0]) {
        failures.push(format!("tree bytes not monotone: {bytes:?}"));
    }
    for w in per_label.windows(2) {
        if w[0] >= 32 && (w[1] as f64) * 1.5 > w[0] as f64 {
            failures.push(format!("leaves per label {} -> {} drops by less than 1.5x", w[0], w[1]));
        }
    }
    let totals: Vec<usize> = report.rows.iter().map(|r| r.leaves).collect();
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "n=10000 k=2 sigma=1..64: tree bytes {bytes:?}, max leaves per label {per_label:?} (total leaves {totals:?}){}",
            failures.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    }
}

fn persistence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9E5);
    let mut failures = Vec::new();
    let mut queries = 0;
    for t in 0..50 {
        let n = log_uniform(&mut rng, 16, 3000);
        let alpha = [2, 4, 26][t % 3];
        let k = rng.gen_range(1..=3).min(max_k(n));
        let sigma = [1, 2, 8, 32][rng.gen_range(0..4)];
        let mode = if t % 2 == 0 { Mode::Linear } else { Mode::Succinct { tau: [2, 8][rng.gen_range(0..2)] } };
        // Uncapped cluster counts grow like sigma^2 log^3 sigma; keep them to small sigma.
        let cap = match rng.gen_range(0..4) {
            0 => Some(0),
            1 => Some(4),
            3 if sigma <= 2 => None,
            _ => Some(64),
        };
        let raw = random_text(&mut rng, n, alpha);
        let params = BuildParams::new(k, sigma).mode(mode).seed(rng.gen()).cluster_cap(cap);
        let index = MismatchIndex::build(&raw, params).expect("valid parameters");
        let with_text = t % 4 != 3;
        let bytes = persist::to_bytes(&index, with_text);
        let loaded = match persist::from_bytes(&bytes, (!with_text).then_some(raw.as_slice())) {
            Ok(l) => l,
            Err(e) => {
                failures.push(format!("index {t}: load failed: {e}"));
                continue;
            }
        };
        if persist::to_bytes(&loaded, with_text) != bytes {
            failures.push(format!("index {t}: re-encoding differs"));
        }
        for _ in 0..100 {
            let (q, r) = pick_query(&mut rng, &raw, k, alpha);
            let a: Vec<Match> = index.query(&q, r).expect("valid query");
            let b: Vec<Match> = loaded.query(&q, r).expect("valid query");
            queries += 1;
            if a != b {
                failures.push(format!("index {t}: q={q:?} r={r} differs after reload"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("50 indices saved and reloaded, {queries} queries compared, {} differences{}", failures.len(), first(&failures)),
    }
}

fn dictionaries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1C7);
    let mut failures = Vec::new();
    let (mut queries, mut hits) = (0usize, 0usize);
    for t in 0..200 {
        let alpha = rng.gen_range(2..=4);
        let count = rng.gen_range(1..=30);
        let entries: Vec<Vec<Symbol>> = (0..count)
            .map(|_| (0..rng.gen_range(1..=8)).map(|_| rng.gen_range(0..alpha)).collect())
            .collect();
        assert!(entries.iter().all(|e| e.len() <= MAX_ENTRY_LEN));
        let k = if rng.gen_bool(0.5) && dictionary_transform(&entries, 2).is_ok() { 2 } else { 1 };
        let sigma = [1, 2, 8, 32][rng.gen_range(0..4)];
        let index = match DictionaryIndex::build(&entries, BuildParams::new(k, sigma).seed(rng.gen())) {
            Ok(i) => i,
            Err(e) => {
                failures.push(format!("dictionary {t}: build failed: {e}"));
                continue;
            }
        };
        for _ in 0..10 {
            let q: Vec<Symbol> = if rng.gen_bool(0.7) {
                let mut q = entries[rng.gen_range(0..count)].clone();
                for _ in 0..rng.gen_range(0..=k) {
                    let at = rng.gen_range(0..q.len());
                    q[at] = rng.gen_range(0..alpha);
                }
                q
            } else {
                (0..rng.gen_range(1..=8)).map(|_| rng.gen_range(0..alpha)).collect()
            };
            let r = rng.gen_range(0..=k);
            let want: Vec<EntryMatch> = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.len() == q.len())
                .map(|(entry, e)| EntryMatch { entry, distance: hamming_naive(e, &q) })
                .filter(|m| m.distance <= r)
                .collect();
            let got = index.query(&q, r).expect("valid query");
            queries += 1;
            hits += got.len();
            if got != want {
                failures.push(format!("dictionary {t}: q={q:?} r={r}: {got:?} vs {want:?}"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "200 dictionaries, {queries} queries ({hits} entry matches), {} disagreements with per-entry filtering{}",
            failures.len(),
            first(&failures)
        ),
    }
}

fn main() -> ExitCode {
    let only: Option<Vec<String>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').map(str::to_string).collect());
    let wanted = |name: &str| only.as_ref().map_or(true, |o| o.iter().any(|x| x == name));
    let needs_sweep = ["linear", "succinct", "structure", "counter", "duplicates"].iter().any(|n| wanted(n));

    let mut lines: Vec<(&str, Outcome, f64)> = Vec::new();
    let mut linear = Sweep::default();
    let mut succinct = Sweep::default();
    if needs_sweep {
        let t = Instant::now();
        linear = equivalence_sweep(2000, false, 0x11EA);
        let tl = t.elapsed().as_secs_f64();
        let t = Instant::now();
        succinct = equivalence_sweep(500, true, 0x5CC7);
        let ts = t.elapsed().as_secs_f64();
        lines.push(("linear", linear_equivalence(&linear), tl));
        lines.push(("succinct", succinct_equivalence(&succinct), ts));
    }
    let mut all = Sweep::default();
    all.absorb(linear);
    all.absorb(succinct);

    type Check = fn() -> Outcome;
    let standalone: [(&str, Check); 6] = [
        ("inversion", inversion_completeness),
        ("observations", observations),
        ("alteration", alteration_and_padding),
        ("space", space_trend),
        ("persistence", persistence),
        ("dictionary", dictionaries),
    ];
    if needs_sweep {
        lines.push(("structure", structural(&all), 0.0));
        lines.push(("counter", subtree_counter(&all), 0.0));
        lines.push(("duplicates", no_duplicates(&all), 0.0));
    }
    for (name, check) in standalone {
        if wanted(name) {
            let t = Instant::now();
            let o = check();
            lines.push((name, o, t.elapsed().as_secs_f64()));
        }
    }

    let titles: BTreeMap<&str, &str> = [
        ("linear", "oracle equivalence, linear mode"),
        ("succinct", "oracle equivalence, succinct mode"),
        ("inversion", "function inversion completeness"),
        ("structure", "structural invariants"),
        ("counter", "query subtree counter"),
        ("observations", "distance reduction identities"),
        ("alteration", "pivot alteration and sentinel padding"),
        ("duplicates", "no duplicate outputs"),
        ("space", "space trend"),
        ("persistence", "persistence round trip"),
        ("dictionary", "dictionary reduction"),
    ]
    .into_iter()
    .collect();
    let order = [
        "linear", "succinct", "inversion", "structure", "counter", "observations", "alteration", "duplicates",
        "space", "persistence", "dictionary",
    ];
    let mut failed = 0;
    println!();
    for name in order {
        if let Some((_, o, secs)) = lines.iter().find(|(n, _, _)| *n == name) {
            let timing = if *secs > 0.0 { format!(" [{secs:.1}s]") } else { String::new() };
            println!("{} {}: {}{timing}", if o.pass { "PASS" } else { "FAIL" }, titles[name], o.summary);
            failed += !o.pass as usize;
        }
    }
    println!();
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
