//! Spin-spin correlations along the primitive vectors of the current
//! decimation frame.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::SnapshotDataset;
use crate::error::{Error, Result};
use crate::lattice::Frame;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFunction {
    /// Separations `0..=max_d` in units of the current primitive vectors.
    pub separations: Vec<usize>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_steps: usize,
    pub dimension: usize,
    /// Lattice-spacing growth `lambda^n` of the frame.
    pub scale: f64,
    /// Factor already applied to `values` and `stderr` by rescaling.
    pub rescale_factor: f64,
    pub n_snapshots: usize,
}

impl CorrelationFunction {
    /// Separations in units of the original lattice spacing.
    pub fn physical_separations(&self) -> Vec<f64> {
        self.separations
            .iter()
            .map(|&d| d as f64 * self.scale)
            .collect()
    }
}

/// `C(d) = <s_i s_{i + d e}>` averaged over retained sites `i`, the frame's
/// primitive vectors `e` and all snapshots. The error is the standard error
/// of the per-snapshot averages.
pub fn correlation_function(
    dataset: &SnapshotDataset,
    max_d: usize,
) -> Result<CorrelationFunction> {
    let lattice = dataset.lattice();
    let mask = dataset.mask();
    let frame = mask.frame();
    let period = frame
        .vectors()
        .iter()
        .map(|e| mask.period_along(e))
        .min()
        .expect("dimension >= 1");
    if 2 * max_d > period {
        return Err(Error::SeparationTooLarge { max_d, period });
    }
    let n = mask.len();
    let axes = frame.vectors().len();

    // partners[(d - 1) * axes + a][p]: retained position reached from p by d e_a
    let coords = mask.retained_coordinates();
    let mut partners: Vec<Vec<u32>> = Vec::with_capacity(max_d * axes);
    for d in 1..=max_d as i64 {
        for e in frame.vectors() {
            let table = coords
                .iter()
                .map(|(site, _)| {
                    let x: Vec<i64> = lattice
                        .coords_of(*site)
                        .iter()
                        .zip(e)
                        .map(|(&c, &ei)| c as i64 + d * ei)
                        .collect();
                    let target = lattice.wrapped_index(&x);
                    mask.position_of(target)
                        .expect("frame translations map the sublattice onto itself")
                        as u32
                })
                .collect();
            partners.push(table);
        }
    }

    let norm = (n * axes) as f64;
    let per_snapshot: Vec<Vec<f64>> = dataset
        .snapshots()
        .par_iter()
        .map(|s| {
            let spins: Vec<i8> = s.to_spins();
            (0..max_d)
                .map(|k| {
                    let mut acc = 0i64;
                    for table in &partners[k * axes..(k + 1) * axes] {
                        acc += spins
                            .iter()
                            .zip(table)
                            .map(|(&a, &p)| (a * spins[p as usize]) as i64)
                            .sum::<i64>();
                    }
                    acc as f64 / norm
                })
                .collect()
        })
        .collect();

    let nr = per_snapshot.len() as f64;
    let mut values = vec![1.0];
    let mut stderr = vec![0.0];
    for k in 0..max_d {
        let mean = per_snapshot.iter().map(|c| c[k]).sum::<f64>() / nr;
        let var = if nr > 1.0 {
            per_snapshot
                .iter()
                .map(|c| (c[k] - mean).powi(2))
                .sum::<f64>()
                / (nr - 1.0)
        } else {
            0.0
        };
        values.push(mean);
        stderr.push((var / nr).sqrt());
    }
    Ok(CorrelationFunction {
        separations: (0..=max_d).collect(),
        values,
        stderr,
        n_steps: dataset.n_steps_applied(),
        dimension: lattice.dimension(),
        scale: Frame::scale_factor(lattice.dimension(), dataset.n_steps_applied()),
        rescale_factor: 1.0,
        n_snapshots: dataset.len(),
    })
}

/// Multiplies values and errors by `lambda^(n eta)`; separations are left in
/// current-frame units.
pub fn rescale_correlation(corr: &CorrelationFunction, eta: f64) -> CorrelationFunction {
    let factor = corr.scale.powf(eta);
    CorrelationFunction {
        values: corr.values.iter().map(|v| v * factor).collect(),
        stderr: corr.stderr.iter().map(|e| e * factor).collect(),
        rescale_factor: corr.rescale_factor * factor,
        ..corr.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationLength {
    /// In units of the current primitive vectors.
    pub xi: f64,
    pub stderr: f64,
    pub d_min: usize,
    pub d_max: usize,
}

/// Fits `ln C(d) = a - d / xi` over the leading run of `d >= 1` where
/// `C(d)` exceeds three standard errors.
pub fn correlation_length(corr: &CorrelationFunction) -> Result<CorrelationLength> {
    let points: Vec<(f64, f64)> = corr
        .separations
        .iter()
        .zip(corr.values.iter().zip(&corr.stderr))
        .filter(|(&d, _)| d >= 1)
        .map_while(|(&d, (&c, &e))| (c > 0.0 && c > 3.0 * e).then(|| (d as f64, c.ln())))
        .collect();
    if points.len() < 2 {
        return Err(Error::NotExponential(format!(
            "only {} separations carry signal above three standard errors",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if slope > -1e-3 {
        return Err(Error::NotExponential(format!(
            "log-correlation slope {slope:.3e} is not decaying"
        )));
    }
    let resid: f64 = points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let slope_err = if points.len() > 2 {
        (resid / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(CorrelationLength {
        xi: -1.0 / slope,
        stderr: slope_err / (slope * slope),
        d_min: points[0].0 as usize,
        d_max: points[points.len() - 1].0 as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Metadata, Snapshot};
    use crate::lattice::LatticeSpec;
    use crate::rg::rg_flow;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(l: &LatticeSpec, snaps: Vec<Snapshot>) -> SnapshotDataset {
        SnapshotDataset::new(l.clone(), 0, snaps, Metadata::ingested("t")).unwrap()
    }

    fn synthetic(values: Vec<f64>) -> CorrelationFunction {
        CorrelationFunction {
            separations: (0..values.len()).collect(),
            stderr: vec![0.0; values.len()],
            values,
            n_steps: 0,
            dimension: 2,
            scale: 1.0,
            rescale_factor: 1.0,
            n_snapshots: 1,
        }
    }

    #[test]
    fn ordered_data() {
        let l = LatticeSpec::new(2, &[8, 8]).unwrap();
        let c = correlation_function(
            &dataset(&l, vec![Snapshot::ones(64), Snapshot::zeros(64)]),
            4,
        )
        .unwrap();
        assert_eq!(c.values, vec![1.0; 5]);
        assert!(c.stderr.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn checkerboard_alternates_then_is_uniform_after_one_step() {
        let l = LatticeSpec::new(2, &[8, 8]).unwrap();
        let board = Snapshot::from_bits((0..64).map(|i| (i % 8 + i / 8) % 2 == 0));
        let d = dataset(&l, vec![board]);
        let c = correlation_function(&d, 4).unwrap();
        assert_eq!(c.values, vec![1.0, -1.0, 1.0, -1.0, 1.0]);
        let flow = rg_flow(&d, 1).unwrap();
        let c1 = correlation_function(flow.dataset(1), 2).unwrap();
        assert_eq!(c1.values, vec![1.0; 3]);
        assert!((c1.scale - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn independent_spins_are_uncorrelated() {
        let l = LatticeSpec::new(2, &[16, 16]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let snaps = (0..2000)
            .map(|_| Snapshot::from_bits((0..256).map(|_| rng.random_bool(0.5))))
            .collect();
        let c = correlation_function(&dataset(&l, snaps), 8).unwrap();
        for d in 1..=8 {
            assert!(
                c.values[d].abs() < 4.0 * c.stderr[d],
                "d={d}: {} ± {}",
                c.values[d],
                c.stderr[d]
            );
        }
        assert!(correlation_length(&c).is_err());
    }

    #[test]
    fn separation_limit() {
        let l = LatticeSpec::new(2, &[8, 8]).unwrap();
        let d = dataset(&l, vec![Snapshot::ones(64)]);
        assert!(correlation_function(&d, 4).is_ok());
        assert!(matches!(
            correlation_function(&d, 5),
            Err(Error::SeparationTooLarge {
                max_d: 5,
                period: 8
            })
        ));
        let flow = rg_flow(&d, 2).unwrap();
        // frame (2,0),(0,2): period 4 along each axis
        assert!(correlation_function(flow.dataset(2), 2).is_ok());
        assert!(correlation_function(flow.dataset(2), 3).is_err());
    }

    #[test]
    fn rescaling() {
        let mut c = synthetic(vec![1.0, 0.5, 0.25]);
        assert_eq!(rescale_correlation(&c, 0.25), c);
        c.n_steps = 2;
        c.scale = 2.0;
        let r = rescale_correlation(&c, 0.25);
        assert_eq!(r.separations, c.separations);
        let f = 2f64.powf(0.25);
        for (a, b) in r.values.iter().zip(&c.values) {
            assert!((a - b * f).abs() < 1e-15);
        }
    }

    #[test]
    fn exponential_decay_length() {
        let c = synthetic((0..10).map(|d| (-(d as f64) / 3.0).exp()).collect());
        let xi = correlation_length(&c).unwrap();
        assert!((xi.xi - 3.0).abs() < 0.01, "{xi:?}");
        assert_eq!((xi.d_min, xi.d_max), (1, 9));
    }

    #[test]
    fn flat_correlation_is_not_exponential() {
        assert!(matches!(
            correlation_length(&synthetic(vec![1.0; 6])),
            Err(Error::NotExponential(_))
        ));
    }
}
