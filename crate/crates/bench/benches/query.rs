use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mismatch_index::{BuildParams, MismatchIndex, Mode};
use mismatch_index_bench::{perturbed_queries, random_text};

fn query(c: &mut Criterion) {
    let mut g = c.benchmark_group("query");
    g.sample_size(10);
    let text = random_text(4000, 4, 1);
    let queries = perturbed_queries(&text, 16, 2, 20, 2);
    for sigma in [1, 8, 32] {
        for (name, mode) in [("linear", Mode::Linear), ("succinct8", Mode::Succinct { tau: 8 })] {
            let index = MismatchIndex::build(&text, BuildParams::new(2, sigma).mode(mode)).unwrap();
            g.bench_with_input(BenchmarkId::new(name, sigma), &index, |b, index| {
                b.iter(|| queries.iter().map(|q| index.query(q, 2).unwrap().len()).sum::<usize>())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, query);
criterion_main!(benches);
