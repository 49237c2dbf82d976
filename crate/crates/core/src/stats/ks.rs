//! Two-sample Kolmogorov-Smirnov distances between degree samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionDistance {
    /// `sup_x |F_a(x) - F_b(x)|`, in `[0, 1]`.
    pub statistic: f64,
    pub n_a: usize,
    pub n_b: usize,
}

impl DistributionDistance {
    /// Asymptotic two-sample critical value at significance `alpha`.
    pub fn critical_value(&self, alpha: f64) -> f64 {
        ks_critical_value(alpha, self.n_a, self.n_b)
    }
}

/// `c(alpha) sqrt((n + m) / (n m))` with `c(alpha) = sqrt(-ln(alpha / 2) / 2)`.
pub fn ks_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

pub fn ks_distance<T: Ord + Copy>(a: &[T], b: &[T]) -> Result<DistributionDistance> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("KS sample"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_unstable();
    y.sort_unstable();
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < n && j < m {
        // advance past every copy of the smaller value so ties move together
        let v = x[i].min(y[j]);
        while i < n && x[i] == v {
            i += 1;
        }
        while j < m && y[j] == v {
            j += 1;
        }
        sup = sup.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(DistributionDistance {
        statistic: sup,
        n_a: n,
        n_b: m,
    })
}

/// Pairwise statistics; the diagonal is zero.
pub fn ks_matrix<T: Ord + Copy>(samples: &[Vec<T>]) -> Result<Vec<Vec<f64>>> {
    let k = samples.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = ks_distance(&samples[i], &samples[j])?.statistic;
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::powerlaw::sample_discrete_power_law;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct evaluation of both empirical CDFs at every observed value.
    fn brute(a: &[u32], b: &[u32]) -> f64 {
        let cdf = |s: &[u32], x: u32| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b)
            .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn examples() {
        assert_eq!(
            ks_distance(&[1u32, 2, 3], &[1, 2, 3]).unwrap().statistic,
            0.0
        );
        assert_eq!(ks_distance(&[0u32; 4], &[10u32; 7]).unwrap().statistic, 1.0);
        assert!(ks_distance::<u32>(&[], &[1]).is_err());
        assert!(
            (ks_critical_value(0.01, 10_000, 10_000) - 1.6276 * (2.0f64 / 1e4).sqrt()).abs() < 1e-4
        );
    }

    #[test]
    fn same_power_law_below_critical_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = sample_discrete_power_law(0.75, 10_000, 10_000, &mut rng);
        let b = sample_discrete_power_law(0.75, 10_000, 10_000, &mut rng);
        let d = ks_distance(&a, &b).unwrap();
        assert!(d.statistic < d.critical_value(0.01), "{d:?}");
    }

    #[test]
    fn matrix() {
        let m = ks_matrix(&[vec![0u32, 1], vec![5, 6], vec![0, 1]]).unwrap();
        assert_eq!(
            m,
            vec![
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 1.0],
                vec![0.0, 1.0, 0.0]
            ]
        );
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            a in prop::collection::vec(0u32..20, 1..60),
            b in prop::collection::vec(0u32..20, 1..60),
        ) {
            let d = ks_distance(&a, &b).unwrap().statistic;
            prop_assert!((d - brute(&a, &b)).abs() < 1e-12);
            prop_assert_eq!(d, ks_distance(&b, &a).unwrap().statistic);
            prop_assert_eq!(ks_distance(&a, &a).unwrap().statistic, 0.0);
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
