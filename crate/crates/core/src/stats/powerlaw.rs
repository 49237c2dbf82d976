//! Power-law fits `P_k ∝ k^(-gamma)` on log-binned histograms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::histogram::DegreeHistogram;
use crate::error::{Error, Result};

pub const MIN_FIT_BINS: usize = 5;
pub const MIN_FIT_DECADES: f64 = 1.0;
pub const MIN_FIT_R2: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Positive for decaying distributions.
    pub gamma: f64,
    pub stderr: f64,
    /// Bin centers bounding the fit.
    pub k_low: f64,
    pub k_high: f64,
    /// Weighted coefficient of determination in log-log space.
    pub r2: f64,
    pub n_bins: usize,
}

impl PowerLawFit {
    pub fn decades(&self) -> f64 {
        (self.k_high / self.k_low).log10()
    }
}

/// Weighted least squares of `ln density` against `ln center` over the given
/// bins, weighting each bin by its count.
fn fit_bins(h: &DegreeHistogram, bins: &[usize]) -> PowerLawFit {
    let pts: Vec<(f64, f64, f64)> = bins
        .iter()
        .map(|&i| (h.centers[i].ln(), h.density[i].ln(), h.counts[i] as f64))
        .collect();
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| p.2 * (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| p.2 * (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let dof = (pts.len() as f64 - 2.0).max(1.0);
    // Residual-scaled error: effective weights are relative, not absolute.
    let stderr = (ss_res / dof / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    PowerLawFit {
        gamma: -slope,
        stderr,
        k_low: h.centers[bins[0]],
        k_high: h.centers[bins[bins.len() - 1]],
        r2,
        n_bins: bins.len(),
    }
}

/// Fits the occupied bins whose centers lie in `window`, or, without a
/// window, the widest run of consecutive occupied bins spanning at least a
/// decade and [`MIN_FIT_BINS`] bins whose fit reaches `R^2 >=`
/// [`MIN_FIT_R2`]. Ties in width go to the run with more bins, then the
/// better `R^2`.
pub fn fit_power_law(h: &DegreeHistogram, window: Option<(f64, f64)>) -> Result<PowerLawFit> {
    match window {
        Some((lo, hi)) => {
            if !(lo > 0.0 && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "bad fit window [{lo}, {hi}]"
                )));
            }
            let bins: Vec<usize> = h
                .occupied()
                .into_iter()
                .filter(|&i| h.centers[i] >= lo && h.centers[i] <= hi)
                .collect();
            if bins.len() < MIN_FIT_BINS {
                return Err(Error::NoPowerLawWindow(format!(
                    "window [{lo}, {hi}] holds {} occupied bins, need {MIN_FIT_BINS}",
                    bins.len()
                )));
            }
            Ok(fit_bins(h, &bins))
        }
        None => auto_window(h),
    }
}

fn auto_window(h: &DegreeHistogram) -> Result<PowerLawFit> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for i in h.occupied() {
        match runs.last_mut() {
            Some(run) if *run.last().expect("nonempty") + 1 == i => run.push(i),
            _ => runs.push(vec![i]),
        }
    }
    let mut best: Option<PowerLawFit> = None;
    for run in &runs {
        for a in 0..run.len() {
            for b in a + MIN_FIT_BINS - 1..run.len() {
                let decades = (h.centers[run[b]] / h.centers[run[a]]).log10();
                if decades < MIN_FIT_DECADES {
                    continue;
                }
                if let Some(cur) = &best {
                    if decades < cur.decades() - 1e-12 {
                        continue;
                    }
                }
                let fit = fit_bins(h, &run[a..=b]);
                if fit.r2 < MIN_FIT_R2 {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        let (d0, d1) = (cur.decades(), fit.decades());
                        if (d1 - d0).abs() > 1e-12 {
                            d1 > d0
                        } else if fit.n_bins != cur.n_bins {
                            fit.n_bins > cur.n_bins
                        } else {
                            fit.r2 > cur.r2
                        }
                    }
                };
                if better {
                    best = Some(fit);
                }
            }
        }
    }
    best.ok_or_else(|| {
        Error::NoPowerLawWindow(format!(
            "no run of >= {MIN_FIT_BINS} occupied bins spans {MIN_FIT_DECADES} decade(s) with R^2 >= {MIN_FIT_R2}"
        ))
    })
}

/// Draws `n` integers from `P_k ∝ k^(-gamma)` on `1..=k_max` by inverting
/// the tabulated CDF.
pub fn sample_discrete_power_law<R: Rng + ?Sized>(
    gamma: f64,
    k_max: u32,
    n: usize,
    rng: &mut R,
) -> Vec<u32> {
    let mut cdf = Vec::with_capacity(k_max as usize);
    let mut total = 0.0;
    for k in 1..=k_max {
        total += (k as f64).powf(-gamma);
        cdf.push(total);
    }
    (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            (cdf.partition_point(|&c| c <= u) as u32 + 1).min(k_max)
        })
        .collect()
}
