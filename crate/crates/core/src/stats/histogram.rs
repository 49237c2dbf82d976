//! Logarithmically binned degree histograms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BIN_RATIO: f64 = 1.3;

/// Bin `i` holds the integer degrees `edges[i] <= k < edges[i + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub ratio: f64,
    pub edges: Vec<u64>,
    pub counts: Vec<u64>,
    /// `count / (n_nonzero * width)`.
    pub density: Vec<f64>,
    /// Geometric mean of the smallest and largest degree in the bin.
    pub centers: Vec<f64>,
    /// Nodes with `k = 0`, kept out of the bins.
    pub zero_count: u64,
    pub n_nonzero: u64,
}

impl DegreeHistogram {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self, bin: usize) -> u64 {
        self.edges[bin + 1] - self.edges[bin]
    }

    /// Indices of bins with at least one count.
    pub fn occupied(&self) -> Vec<usize> {
        (0..self.n_bins()).filter(|&i| self.counts[i] > 0).collect()
    }
}

/// Distinct values among `1, ceil(b), ceil(b^2), ...`, with the last edge
/// clipped to `max_degree + 1`.
pub fn log_bin_edges(max_degree: u64, ratio: f64) -> Result<Vec<u64>> {
    if !(ratio.is_finite() && ratio > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "bin ratio must exceed 1, got {ratio}"
        )));
    }
    let mut edges = vec![1u64];
    let mut m = 1i32;
    while *edges.last().expect("nonempty") <= max_degree {
        let prev = *edges.last().expect("nonempty");
        let next = ratio.powi(m).ceil() as u64;
        if next > prev {
            edges.push(next.min(max_degree + 1));
        }
        m += 1;
    }
    Ok(edges)
}

pub fn log_binned_histogram(degrees: &[u32], ratio: f64) -> Result<DegreeHistogram> {
    if degrees.is_empty() {
        return Err(Error::EmptyInput("degree list"));
    }
    let zero_count = degrees.iter().filter(|&&k| k == 0).count() as u64;
    let n_nonzero = degrees.len() as u64 - zero_count;
    let max = degrees.iter().copied().max().unwrap_or(0) as u64;
    let edges = if n_nonzero == 0 {
        log_bin_edges(0, ratio)?
    } else {
        log_bin_edges(max, ratio)?
    };
    let mut counts = vec![0u64; edges.len() - 1];
    for &k in degrees.iter().filter(|&&k| k > 0) {
        let bin = edges.partition_point(|&e| e <= k as u64) - 1;
        counts[bin] += 1;
    }
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| {
            if n_nonzero == 0 {
                0.0
            } else {
                c as f64 / (n_nonzero as f64 * (w[1] - w[0]) as f64)
            }
        })
        .collect();
    let centers = edges
        .windows(2)
        .map(|w| ((w[0] * (w[1] - 1)) as f64).sqrt())
        .collect();
    Ok(DegreeHistogram {
        ratio,
        edges,
        counts,
        density,
        centers,
        zero_count,
        n_nonzero,
    })
}
