//! Errors of means over autocorrelated Monte Carlo series.

/// Mean and the blocking estimate of its standard error: the series is
/// repeatedly halved by averaging neighbours, and the largest naive error
/// among levels that keep at least `min_blocks` blocks is returned.
pub fn blocked_mean(series: &[f64], min_blocks: usize) -> (f64, f64) {
    let n = series.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut level: Vec<f64> = series.to_vec();
    let mut best = 0.0f64;
    while level.len() >= min_blocks.max(2) {
        let m = level.len() as f64;
        let mu = level.iter().sum::<f64>() / m;
        let var = level.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (m - 1.0);
        best = best.max((var / m).sqrt());
        level = level.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    }
    (mean, best)
}
