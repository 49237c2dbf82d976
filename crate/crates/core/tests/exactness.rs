//! Sampled statistics against brute-force enumeration on small lattices.

use std::collections::HashMap;

use snaprg::mcmc::{
    energy, exact_enumeration, sample_snapshots, Couplings, IsingModel, SamplerConfig,
};
use snaprg::stats::blocked_mean;
use snaprg::{apply_rg, LatticeSpec, SiteMask, Snapshot, SnapshotDataset};

fn model(l: usize, c: Couplings) -> IsingModel {
    IsingModel::new(LatticeSpec::new(2, &[l, l]).unwrap(), c).unwrap()
}

fn sample(m: &IsingModel, beta: f64, n: usize, mix: f64, seed: u64) -> SnapshotDataset {
    let cfg = SamplerConfig {
        thermalization_sweeps: 200,
        decorrelation_sweeps: 2,
        n_chains: 4,
        wolff_fraction: mix,
        seed,
        ..SamplerConfig::new(beta, n)
    };
    sample_snapshots(m, &cfg).unwrap()
}

fn check_moments(c: Couplings, mix: f64, seed: u64) {
    let beta = 0.4;
    let m = model(4, c);
    let exact = exact_enumeration(&m, beta).unwrap();
    let data = sample(&m, beta, 200_000, mix, seed);
    let e: Vec<f64> = data
        .snapshots()
        .iter()
        .map(|s| energy(&m, s).unwrap() / 16.0)
        .collect();
    let mag: Vec<f64> = data
        .snapshots()
        .iter()
        .map(|s| s.magnetization() as f64 / 16.0)
        .collect();
    let abs_m: Vec<f64> = mag.iter().map(|x| x.abs()).collect();
    for (name, series, want) in [
        ("E/N", &e, exact.energy_per_site),
        ("m", &mag, exact.magnetization),
        ("|m|", &abs_m, exact.abs_magnetization),
    ] {
        let (mean, err) = blocked_mean(series, 64);
        assert!(
            (mean - want).abs() < 4.0 * err,
            "{} mix {mix}: {name} = {mean} ± {err}, exact {want}",
            c.describe()
        );
    }
}

#[test]
fn metropolis_matches_enumeration() {
    check_moments(Couplings::ferromagnet(1.0), 0.0, 1);
}

#[test]
fn mixed_updates_match_enumeration() {
    check_moments(Couplings::ferromagnet(1.0), 0.5, 2);
}

#[test]
fn next_nearest_model_matches_enumeration() {
    check_moments(Couplings::with_next_nearest(1.0), 0.5, 3);
}

#[test]
fn field_model_matches_enumeration() {
    check_moments(Couplings::with_field(1.0), 0.0, 4);
}

fn total_variation(empirical: &HashMap<u64, usize>, n: usize, exact: &[f64]) -> f64 {
    let mut tv = 0.0;
    for (x, &p) in exact.iter().enumerate() {
        let q = *empirical.get(&(x as u64)).unwrap_or(&0) as f64 / n as f64;
        tv += (p - q).abs();
    }
    0.5 * tv
}

fn histogram(snaps: &[Snapshot]) -> HashMap<u64, usize> {
    let mut h = HashMap::new();
    for s in snaps {
        *h.entry(s.words()[0]).or_insert(0) += 1;
    }
    h
}

#[test]
fn two_by_two_boltzmann_table() {
    let m = model(2, Couplings::ferromagnet(1.0));
    let exact = exact_enumeration(&m, 0.3).unwrap().probabilities.unwrap();
    for mix in [0.0, 0.5] {
        let data = sample(&m, 0.3, 200_000, mix, 6);
        let tv = total_variation(&histogram(data.snapshots()), data.len(), &exact);
        assert!(tv < 0.01, "mix {mix}: TV {tv}");
    }
}

#[test]
fn decimated_samples_follow_the_exact_marginal() {
    let m = model(4, Couplings::ferromagnet(1.0));
    let beta = 0.4;
    let joint = exact_enumeration(&m, beta).unwrap().probabilities.unwrap();
    let mask = SiteMask::new(m.lattice(), 1).unwrap();
    let mut marginal = vec![0.0; 1 << mask.len()];
    for (x, p) in joint.iter().enumerate() {
        let key: usize = mask
            .retained()
            .iter()
            .enumerate()
            .map(|(k, &site)| ((x >> site) & 1) << k)
            .sum();
        marginal[key] += p;
    }
    let data = sample(&m, beta, 200_000, 0.5, 7);
    let reduced = apply_rg(&data, &mask).unwrap();
    assert_eq!(reduced.bits_per_snapshot(), 8);
    let tv = total_variation(&histogram(reduced.snapshots()), reduced.len(), &marginal);
    assert!(tv < 0.02, "TV {tv}");
}
