//! Single-purpose subcommands. Each returns the paths it wrote so callers
//! and tests can inspect them.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use snaprg::dataset::{ingest_text, SymbolMapping};
use snaprg::mcmc::sample_with_stats;
use snaprg::stats::{correlation_function, correlation_length, rescale_correlation};
use snaprg::wfn::read_degrees;
use snaprg::{
    build_wfn_with, deduplicate, read_dataset, rg_flow, write_dataset, LatticeSpec,
    SnapshotDataset, WfnConfig, WfnResult,
};

use crate::config::ValidatedConfig;
use crate::pipeline::analyze_degrees;
use crate::tables;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into())
}

/// Samples the configured model into a single dataset file.
pub fn cmd_sample(cfg: &ValidatedConfig, output: &Path) -> Result<SnapshotDataset> {
    let (data, stats) = sample_with_stats(&cfg.model, &cfg.sampler).context("sampling")?;
    info!(
        "{} snapshots; metropolis acceptance {:.4}; {} Wolff flips, mean cluster {:.1}",
        data.len(),
        stats.acceptance_rate(),
        stats.wolff_updates,
        stats.mean_cluster_size()
    );
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_dataset(&data, output).with_context(|| format!("writing {}", output.display()))?;
    Ok(data)
}

/// Converts a text file of configurations into a dataset file.
pub fn cmd_ingest(
    input: &Path,
    lattice: &LatticeSpec,
    mapping: SymbolMapping,
    output: &Path,
) -> Result<SnapshotDataset> {
    let data = ingest_text(input, lattice, mapping)
        .with_context(|| format!("ingesting {}", input.display()))?;
    write_dataset(&data, output).with_context(|| format!("writing {}", output.display()))?;
    info!(
        "ingested {} snapshots of {} sites",
        data.len(),
        lattice.num_sites()
    );
    Ok(data)
}

/// Writes `<stem>_step<k>.snaprg` for every step beyond the input's own;
/// with `n_steps = 0` the input is copied as `<stem>_step<k0>.snaprg`.
pub fn cmd_rg(input: &Path, n_steps: usize, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let data = read_dataset(input).with_context(|| format!("reading {}", input.display()))?;
    fs::create_dir_all(out_dir)?;
    let base = data.n_steps_applied();
    let name = stem(input);
    let flow = rg_flow(&data, n_steps)?;
    let mut written = Vec::new();
    for (k, d) in flow.into_datasets().into_iter().enumerate() {
        if k == 0 && n_steps > 0 {
            continue;
        }
        let path = out_dir.join(format!("{name}_step{}.snaprg", base + k));
        write_dataset(&d, &path).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

/// Builds the network of a dataset's unique snapshots and writes the
/// `node r1 degree` table.
pub fn cmd_wfn(input: &Path, output: &Path, config: &WfnConfig) -> Result<WfnResult> {
    let data = read_dataset(input).with_context(|| format!("reading {}", input.display()))?;
    let unique = deduplicate(&data);
    info!("{} unique of {} snapshots", unique.len(), data.len());
    let result = build_wfn_with(&unique, config)?;
    let mut w = create(output)?;
    result.write_tsv(&mut w)?;
    w.flush()?;
    Ok(result)
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeRequest {
    pub degree_files: Vec<PathBuf>,
    pub bin_ratio: f64,
    pub fit_window: Option<(f64, f64)>,
    pub correlation_files: Vec<PathBuf>,
    pub max_d: usize,
    pub eta: f64,
    pub out_dir: PathBuf,
}

/// Histograms, fits and the KS matrix for degree tables; correlation tables
/// (raw and rescaled) for dataset files.
pub fn cmd_analyze(req: &AnalyzeRequest) -> Result<Vec<PathBuf>> {
    if req.degree_files.is_empty() && req.correlation_files.is_empty() {
        bail!("nothing to analyze: give degree tables and/or datasets for correlations");
    }
    fs::create_dir_all(&req.out_dir)?;
    let mut written = Vec::new();
    if !req.degree_files.is_empty() {
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for path in &req.degree_files {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            degrees.push(
                read_degrees(BufReader::new(f))
                    .with_context(|| format!("reading {}", path.display()))?,
            );
            let mut label = stem(path);
            while labels.contains(&label) {
                label.push('\'');
            }
            labels.push(label);
        }
        let a = analyze_degrees(&labels, &degrees, req.bin_ratio, req.fit_window)?;
        for (label, h) in labels.iter().zip(&a.histograms) {
            let path = req.out_dir.join(format!("hist_{label}.tsv"));
            let mut w = create(&path)?;
            tables::write_histogram(&mut w, h)?;
            w.flush()?;
            written.push(path);
        }
        let fits = req.out_dir.join("fits.tsv");
        let mut w = create(&fits)?;
        tables::write_fits(&mut w, &a.fits)?;
        w.flush()?;
        written.push(fits);
        let ks = req.out_dir.join("ks_matrix.tsv");
        let mut w = create(&ks)?;
        tables::write_matrix(&mut w, &labels, &a.ks)?;
        w.flush()?;
        written.push(ks);
    }
    for path in &req.correlation_files {
        let data = read_dataset(path).with_context(|| format!("reading {}", path.display()))?;
        let c = correlation_function(&data, req.max_d)?;
        let rescaled = rescale_correlation(&c, req.eta);
        match correlation_length(&c) {
            Ok(x) => info!(
                "{}: correlation length {:.4} +- {:.4}",
                path.display(),
                x.xi,
                x.stderr
            ),
            Err(e) => info!("{}: {e}", path.display()),
        }
        let out = req.out_dir.join(format!("corr_{}.tsv", stem(path)));
        let mut w = create(&out)?;
        tables::write_correlation(&mut w, &c, &rescaled, req.eta)?;
        w.flush()?;
        written.push(out);
    }
    Ok(written)
}
