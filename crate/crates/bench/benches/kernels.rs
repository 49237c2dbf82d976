use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snaprg::wfn::{available_isas, build_from_snapshots, hamming, WfnConfig};
use snaprg::Snapshot;

fn random_snapshots(n: usize, bits: usize, seed: u64) -> Vec<Snapshot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Snapshot::from_bits((0..bits).map(|_| rng.random_bool(0.5))))
        .collect()
}

fn single_distance(c: &mut Criterion) {
    let s = random_snapshots(2, 4096, 1);
    let mut g = c.benchmark_group("hamming");
    g.throughput(Throughput::Elements(64));
    g.bench_function("4096 bits", |b| b.iter(|| hamming(&s[0], &s[1]).unwrap()));
    g.finish();
}

/// Word operations per pass: all pairs times words per snapshot.
fn all_pairs(c: &mut Criterion) {
    let n = 2000;
    let bits = 4096;
    let s = random_snapshots(n, bits, 2);
    let pairs = (n * (n - 1) / 2) as u64;
    let mut g = c.benchmark_group("build_wfn");
    g.sample_size(10);
    // two passes over every pair
    g.throughput(Throughput::Elements(2 * pairs * (bits / 64) as u64));
    for isa in available_isas() {
        let cfg = WfnConfig {
            isa: Some(isa),
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::new(format!("{isa:?}"), n), &s, |b, s| {
            b.iter(|| build_from_snapshots(s, &cfg).unwrap())
        });
    }
    for block in [64, 128, 512] {
        let cfg = WfnConfig {
            block_size: block,
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::new(format!("block{block}"), n), &s, |b, s| {
            b.iter(|| build_from_snapshots(s, &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, single_distance, all_pairs);
criterion_main!(benches);
