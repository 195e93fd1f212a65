use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use emoset::corpus::LabelRecord;
use emoset::grouping::{Grouper, GroupingStrategy};
use emoset::metrics::evaluate_corpus;
use emoset::taxonomy::{builtin_bundle, Label, ProjectionLevel, WheelId};
use emoset::Execution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(vocab: &[Label], n: usize, rng: &mut ChaCha8Rng) -> Vec<LabelRecord> {
    (0..n)
        .map(|i| {
            let k = rng.random_range(1..=6);
            LabelRecord::new(format!("s{i:06}"), vocab.choose_multiple(rng, k).cloned())
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let bundle = builtin_bundle();
    let grouper = Grouper::new(&bundle);
    let vocab: Vec<Label> = bundle.forms().domain().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let strategies = [GroupingStrategy::M2, GroupingStrategy::m3(WheelId::W4, ProjectionLevel::L2)];

    let mut group = c.benchmark_group("evaluate_corpus");
    for n in [1_000, 20_000] {
        let gt = corpus(&vocab, n, &mut rng);
        let pred = corpus(&vocab, n, &mut rng);
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| {
                    for s in &strategies {
                        evaluate_corpus(&gt, &pred, &grouper, s, exec).unwrap();
                    }
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
