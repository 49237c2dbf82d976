//! Critical-point location from the crossing of Binder cumulants of two
//! lattice sizes.

use super::model::{Couplings, IsingModel};
use super::sampler::{chain_rng, Chain};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct BinderScanConfig {
    pub thermalization_sweeps: usize,
    /// Update slots measured per evaluation of `U_4`.
    pub measurement_sweeps: usize,
    pub wolff_fraction: f64,
    /// Bisection halvings of the initial bracket.
    pub bisection_steps: usize,
    /// Jackknife blocks for the statistical error of `U_4`.
    pub blocks: usize,
    pub seed: u64,
}

impl Default for BinderScanConfig {
    fn default() -> Self {
        Self {
            thermalization_sweeps: 500,
            measurement_sweeps: 20_000,
            wolff_fraction: 0.5,
            bisection_steps: 8,
            blocks: 40,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinderPoint {
    pub beta: f64,
    pub size: usize,
    pub u4: f64,
    pub stderr: f64,
}

/// `U_large - U_small` at one inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSample {
    pub beta: f64,
    pub difference: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalEstimate {
    pub beta_c: f64,
    pub stderr: f64,
    pub bracket: (f64, f64),
    pub samples: Vec<CrossingSample>,
}

impl CriticalEstimate {
    pub fn temperature(&self) -> f64 {
        1.0 / self.beta_c
    }
}

fn binder_from_moments(m2: f64, m4: f64) -> f64 {
    1.0 - m4 / (3.0 * m2 * m2)
}

/// Monte Carlo estimate of `U_4 = 1 - <m^4> / (3 <m^2>^2)` with a jackknife
/// error over contiguous blocks of the measurement series.
pub fn binder_cumulant(
    couplings: &Couplings,
    dimension: usize,
    size: usize,
    beta: f64,
    config: &BinderScanConfig,
    stream: u64,
) -> Result<BinderPoint> {
    let lattice = LatticeSpec::hypercubic(dimension, size)?;
    let model = IsingModel::new(lattice, *couplings)?;
    let mut chain = Chain::new(
        &model,
        beta,
        config.wolff_fraction,
        chain_rng(config.seed, stream),
    )?;
    chain.run(config.thermalization_sweeps);
    let n = model.num_sites() as f64;
    let blocks = config.blocks.max(2);
    let per_block = (config.measurement_sweeps / blocks).max(1);
    let mut block_m2 = Vec::with_capacity(blocks);
    let mut block_m4 = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        let (mut s2, mut s4) = (0.0, 0.0);
        for _ in 0..per_block {
            chain.step();
            let m = chain.state().magnetization() as f64 / n;
            let m2 = m * m;
            s2 += m2;
            s4 += m2 * m2;
        }
        block_m2.push(s2 / per_block as f64);
        block_m4.push(s4 / per_block as f64);
    }
    let b = blocks as f64;
    let t2: f64 = block_m2.iter().sum();
    let t4: f64 = block_m4.iter().sum();
    let u4 = binder_from_moments(t2 / b, t4 / b);
    let leave_one_out: Vec<f64> = block_m2
        .iter()
        .zip(&block_m4)
        .map(|(m2, m4)| binder_from_moments((t2 - m2) / (b - 1.0), (t4 - m4) / (b - 1.0)))
        .collect();
    let mean_loo = leave_one_out.iter().sum::<f64>() / b;
    let var = leave_one_out
        .iter()
        .map(|u| (u - mean_loo).powi(2))
        .sum::<f64>()
        * (b - 1.0)
        / b;
    Ok(BinderPoint {
        beta,
        size,
        u4,
        stderr: var.sqrt(),
    })
}

/// Bisects `beta_range` for the point where the Binder cumulants of the two
/// sizes cross, then fits a line to the cumulant difference near the final
/// bracket. Below the crossing the larger lattice has the smaller cumulant.
pub fn locate_critical_temperature(
    couplings: &Couplings,
    dimension: usize,
    sizes: (usize, usize),
    beta_range: (f64, f64),
    config: &BinderScanConfig,
) -> Result<CriticalEstimate> {
    if !couplings.is_z2_symmetric() {
        return Err(Error::InvalidModel(
            "Binder crossings need a Z2-symmetric model (no longitudinal field)".into(),
        ));
    }
    let (small, large) = (sizes.0.min(sizes.1), sizes.0.max(sizes.1));
    if small == large {
        return Err(Error::InvalidArgument(
            "need two distinct lattice sizes".into(),
        ));
    }
    let (mut lo, mut hi) = beta_range;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "bad beta range [{lo}, {hi}]"
        )));
    }
    let (range_lo, range_hi) = (lo, hi);

    let mut samples: Vec<CrossingSample> = Vec::new();
    let mut evaluate = |beta: f64| -> Result<CrossingSample> {
        let k = samples.len() as u64;
        let a = binder_cumulant(couplings, dimension, small, beta, config, 2 * k)?;
        let b = binder_cumulant(couplings, dimension, large, beta, config, 2 * k + 1)?;
        let s = CrossingSample {
            beta,
            difference: b.u4 - a.u4,
            stderr: a.stderr.hypot(b.stderr),
        };
        samples.push(s);
        Ok(s)
    };

    let f_lo = evaluate(lo)?;
    let f_hi = evaluate(hi)?;
    if f_lo.difference >= 0.0 || f_hi.difference <= 0.0 {
        return Err(Error::NoCrossing { lo, hi });
    }
    for _ in 0..config.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if evaluate(mid)?.difference < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Weighted line through the evaluations near the final bracket.
    let centre = 0.5 * (lo + hi);
    let half_window = (4.0 * (hi - lo)).max(1e-12);
    let near: Vec<&CrossingSample> = samples
        .iter()
        .filter(|s| (s.beta - centre).abs() <= half_window)
        .collect();
    let (beta_c, stderr) = crossing_from_line(&near).unwrap_or((centre, 0.5 * (hi - lo)));
    let beta_c = beta_c.clamp(range_lo, range_hi);
    Ok(CriticalEstimate {
        beta_c,
        stderr,
        bracket: (lo, hi),
        samples,
    })
}

/// Root of the weighted least-squares line `d(beta) = a + b (beta - beta0)`,
/// with a delta-method error.
fn crossing_from_line(points: &[&CrossingSample]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let w: Vec<f64> = points
        .iter()
        .map(|p| 1.0 / p.stderr.max(1e-12).powi(2))
        .collect();
    let sw: f64 = w.iter().sum();
    let x0 = points.iter().zip(&w).map(|(p, w)| w * p.beta).sum::<f64>() / sw;
    let y0 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * p.difference)
        .sum::<f64>()
        / sw;
    let sxx: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.beta - x0).powi(2))
        .sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.beta - x0) * (p.difference - y0))
        .sum();
    let slope = sxy / sxx;
    if slope <= 0.0 {
        return None;
    }
    let root = x0 - y0 / slope;
    let var_y0 = 1.0 / sw;
    let var_slope = 1.0 / sxx;
    let var_root = var_y0 / slope.powi(2) + (y0 / slope.powi(2)).powi(2) * var_slope;
    Some((root, var_root.sqrt()))
}
