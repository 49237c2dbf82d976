use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snaprg::mcmc::{onsager_beta_c, sample_snapshots, Metropolis, SpinState, Wolff};
use snaprg::{apply_rg, Couplings, IsingModel, LatticeSpec, SamplerConfig, SiteMask};

fn square(l: usize, couplings: Couplings) -> IsingModel {
    IsingModel::new(LatticeSpec::new(2, &[l, l]).unwrap(), couplings).unwrap()
}

fn metropolis(c: &mut Criterion) {
    let beta = onsager_beta_c();
    let mut g = c.benchmark_group("metropolis_sweep");
    for (name, couplings) in [
        ("nn", Couplings::ferromagnet(1.0)),
        ("nnn", Couplings::with_next_nearest(1.0)),
        ("field", Couplings::with_field(1.0)),
    ] {
        let model = square(64, couplings);
        let sweeper = Metropolis::new(&model, beta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = SpinState::random(&model, &mut rng);
        g.throughput(Throughput::Elements(model.num_sites() as u64));
        g.bench_function(BenchmarkId::new(name, 64), |b| {
            b.iter(|| sweeper.sweep(&model, &mut state, &mut rng))
        });
    }
    g.finish();
}

fn wolff(c: &mut Criterion) {
    let beta = onsager_beta_c();
    let mut g = c.benchmark_group("wolff_update");
    for l in [32, 64, 128] {
        let model = square(l, Couplings::ferromagnet(1.0));
        let mut updater = Wolff::new(&model, beta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut state = SpinState::random(&model, &mut rng);
        for _ in 0..200 {
            updater.update(&model, &mut state, &mut rng);
        }
        g.bench_function(BenchmarkId::from_parameter(l), |b| {
            b.iter(|| updater.update(&model, &mut state, &mut rng))
        });
    }
    g.finish();
}

fn decimation(c: &mut Criterion) {
    let model = square(128, Couplings::ferromagnet(1.0));
    let mut cfg = SamplerConfig::new(onsager_beta_c(), 2000);
    cfg.thermalization_sweeps = 20;
    cfg.decorrelation_sweeps = 1;
    cfg.n_chains = 1;
    let data = sample_snapshots(&model, &cfg).unwrap();
    let mut g = c.benchmark_group("apply_rg");
    g.throughput(Throughput::Elements(data.len() as u64));
    for steps in [1, 2, 4] {
        let mask = SiteMask::new(model.lattice(), steps).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(steps), &mask, |b, mask| {
            b.iter(|| apply_rg(&data, mask).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, metropolis, wolff, decimation);
criterion_main!(benches);
