//! Brute-force thermal averages over all `2^N` configurations, used as the
//! reference for the samplers and for the decimation marginals.

use super::model::IsingModel;
use crate::dataset::Snapshot;
use crate::error::{Error, Result};

pub const MAX_ENUMERATION_SITES: usize = 20;
pub const MAX_TABLE_SITES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactStats {
    pub beta: f64,
    pub n_sites: usize,
    pub energy_per_site: f64,
    /// `<m>` with `m = (1/N) sum_i s_i`.
    pub magnetization: f64,
    pub abs_magnetization: f64,
    pub m2: f64,
    pub m4: f64,
    /// `<s_i s_j>` averaged over nearest-neighbor bonds.
    pub nn_correlation: f64,
    /// Probability of each configuration, indexed by the packed bits
    /// (bit `i` of the index is site `i`). Present for `N <= 16`.
    pub probabilities: Option<Vec<f64>>,
}

impl ExactStats {
    /// `1 - <m^4> / (3 <m^2>^2)`.
    pub fn binder(&self) -> f64 {
        1.0 - self.m4 / (3.0 * self.m2 * self.m2)
    }
}

pub fn exact_enumeration(model: &IsingModel, beta: f64) -> Result<ExactStats> {
    let n = model.num_sites();
    if n > MAX_ENUMERATION_SITES {
        return Err(Error::TooLargeForEnumeration {
            sites: n,
            max: MAX_ENUMERATION_SITES,
        });
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let states = 1usize << n;
    let mut energies = Vec::with_capacity(states);
    let mut sums = Vec::with_capacity(states);
    for x in 0..states {
        let spins = Snapshot::from_words(n, vec![x as u64]).expect("x < 2^n");
        let (nn, nnn, m) = model.bond_sums(&spins);
        energies.push(model.energy_from_sums(nn, nnn, m));
        sums.push((nn, m));
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies
        .iter()
        .map(|e| (-beta * (e - e_min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();

    let nf = n as f64;
    let bonds = (model.nn_degree() / 2 * n) as f64;
    let (mut e, mut mag, mut abs_m, mut m2, mut m4, mut c1) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for ((w, energy), &(nn, m)) in weights.iter().zip(&energies).zip(&sums) {
        let p = w / z;
        let m = m as f64 / nf;
        e += p * energy;
        mag += p * m;
        abs_m += p * m.abs();
        m2 += p * m * m;
        m4 += p * m.powi(4);
        c1 += p * nn as f64 / bonds;
    }
    let probabilities = (n <= MAX_TABLE_SITES).then(|| weights.iter().map(|w| w / z).collect());
    Ok(ExactStats {
        beta,
        n_sites: n,
        energy_per_site: e / nf,
        magnetization: mag,
        abs_magnetization: abs_m,
        m2,
        m4,
        nn_correlation: c1,
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::mcmc::model::Couplings;

    fn model(l: usize, c: Couplings) -> IsingModel {
        IsingModel::new(LatticeSpec::new(2, &[l, l]).unwrap(), c).unwrap()
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let s = exact_enumeration(&model(2, Couplings::ferromagnet(1.0)), 0.0).unwrap();
        assert!(s.energy_per_site.abs() < 1e-15);
        assert!(s.magnetization.abs() < 1e-15);
        let p = s.probabilities.unwrap();
        assert_eq!(p.len(), 16);
        assert!(p.iter().all(|&x| (x - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn low_temperature_is_ordered() {
        let s = exact_enumeration(&model(4, Couplings::ferromagnet(1.0)), 20.0).unwrap();
        assert!((s.energy_per_site + 2.0).abs() < 1e-9);
        assert!((s.abs_magnetization - 1.0).abs() < 1e-9);
        assert!((s.binder() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn probabilities_normalized() {
        for beta in [0.1, 0.4, 1.0] {
            let s = exact_enumeration(&model(4, Couplings::with_next_nearest(1.0)), beta).unwrap();
            let total: f64 = s.probabilities.unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn field_favors_down_spins() {
        for beta in [0.1, 0.44, 1.0] {
            let s = exact_enumeration(&model(4, Couplings::with_field(1.0)), beta).unwrap();
            assert!(
                s.magnetization < 0.0,
                "beta {beta}: <m> = {}",
                s.magnetization
            );
        }
        let sym = exact_enumeration(&model(4, Couplings::with_next_nearest(1.0)), 0.4).unwrap();
        assert!(sym.magnetization.abs() < 1e-12);
    }

    #[test]
    fn size_limit() {
        let l = LatticeSpec::new(2, &[6, 4]).unwrap();
        let m = IsingModel::new(l, Couplings::ferromagnet(1.0)).unwrap();
        assert!(matches!(
            exact_enumeration(&m, 0.3),
            Err(Error::TooLargeForEnumeration { .. })
        ));
    }

    #[test]
    fn two_by_two_partition_function() {
        // The periodic 2x2 lattice has each neighbor pair doubly bonded:
        // Z = 2 e^{8b} + 12 + 2 e^{-8b}, <E> = -8 (2 e^{8b} - 2 e^{-8b}) / Z.
        let b = 0.3f64;
        let z = 2.0 * (8.0 * b).exp() + 12.0 + 2.0 * (-8.0 * b).exp();
        let e = -8.0 * (2.0 * (8.0 * b).exp() - 2.0 * (-8.0 * b).exp()) / z;
        let s = exact_enumeration(&model(2, Couplings::ferromagnet(1.0)), b).unwrap();
        assert!((s.energy_per_site - e / 4.0).abs() < 1e-12);
    }
}
