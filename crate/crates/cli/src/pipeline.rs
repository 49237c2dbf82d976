//! The staged sample -> rg -> wfn -> analysis -> correlation pipeline.
//!
//! Each stage writes its files into the output directory and records their
//! checksums in `manifest.json`. With `resume`, a stage whose recorded
//! outputs are still intact under an unchanged configuration is skipped and
//! its outputs are read back from disk instead.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::info;
use serde_json::json;
use snaprg::mcmc::sample_with_stats;
use snaprg::stats::{
    correlation_function, correlation_length, fit_power_law, ks_matrix, log_binned_histogram,
    rescale_correlation, DegreeHistogram, PowerLawFit,
};
use snaprg::wfn::read_degrees;
use snaprg::{build_wfn_with, deduplicate, read_dataset, rg_flow, write_dataset, SnapshotDataset};

use crate::config::ValidatedConfig;
use crate::manifest::{sha256_bytes, Manifest, StageRecord};
use crate::tables;

pub const STAGES: [&str; 5] = ["sample", "rg", "wfn", "analysis", "correlation"];

pub fn dataset_file(step: usize) -> PathBuf {
    PathBuf::from(format!("dataset_step{step}.snaprg"))
}

pub fn wfn_file(step: usize) -> PathBuf {
    PathBuf::from(format!("wfn_step{step}.tsv"))
}

pub fn histogram_file(step: usize) -> PathBuf {
    PathBuf::from(format!("hist_step{step}.tsv"))
}

pub fn correlation_file(step: usize) -> PathBuf {
    PathBuf::from(format!("corr_step{step}.tsv"))
}

pub const FITS_FILE: &str = "fits.tsv";
pub const KS_FILE: &str = "ks_matrix.tsv";

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    pub resume: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
    /// Stages reused from a previous run.
    pub skipped: Vec<String>,
}

/// Checksum of the configuration with the output location blanked, so runs
/// into different directories share one identity.
pub fn config_digest(cfg: &ValidatedConfig) -> String {
    let mut raw = cfg.raw.clone();
    raw.io.output_dir = PathBuf::new();
    let mut canonical = serde_json::to_value(&raw).expect("config serializes");
    // record what the validation resolved, not only what was written
    canonical["resolved"] = json!({
        "beta": cfg.sampler.beta,
        "mix": cfg.sampler.wolff_fraction,
        "couplings": cfg.model.couplings().describe(),
    });
    sha256_bytes(canonical.to_string().as_bytes())
}

/// Histograms, fits and the KS matrix for labelled degree samples.
pub struct DegreeAnalysis {
    pub histograms: Vec<DegreeHistogram>,
    pub fits: Vec<(String, Result<PowerLawFit, String>)>,
    pub ks: Vec<Vec<f64>>,
}

pub fn analyze_degrees(
    labels: &[String],
    degrees: &[Vec<u32>],
    bin_ratio: f64,
    window: Option<(f64, f64)>,
) -> Result<DegreeAnalysis> {
    let histograms = degrees
        .iter()
        .map(|d| log_binned_histogram(d, bin_ratio))
        .collect::<snaprg::Result<Vec<_>>>()?;
    let fits = labels
        .iter()
        .zip(&histograms)
        .map(|(l, h)| {
            (
                l.clone(),
                fit_power_law(h, window).map_err(|e| e.to_string()),
            )
        })
        .collect();
    let ks = ks_matrix(degrees)?;
    Ok(DegreeAnalysis {
        histograms,
        fits,
        ks,
    })
}

fn write_file(
    dir: &Path,
    name: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let mut w = BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    body(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("writing {}", path.display()))
}

/// Fills empty slots, `slots[i]` being RG step `first + i`, from disk.
fn load_datasets(dir: &Path, first: usize, slots: &mut [Option<SnapshotDataset>]) -> Result<()> {
    for (i, slot) in slots.iter_mut().enumerate() {
        let k = first + i;
        if slot.is_none() {
            let path = dir.join(dataset_file(k));
            *slot =
                Some(read_dataset(&path).with_context(|| format!("reading {}", path.display()))?);
        }
    }
    Ok(())
}

pub fn run_pipeline(cfg: &ValidatedConfig, opts: PipelineOptions) -> Result<PipelineReport> {
    let dir = cfg.raw.io.output_dir.clone();
    fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let digest = config_digest(cfg);
    let previous = if opts.resume {
        Manifest::load(&dir)
            .context("reading previous manifest")?
            .filter(|m| m.config_sha256 == digest)
    } else {
        None
    };
    let mut manifest = Manifest::new(digest);
    let mut skipped = Vec::new();
    // once a stage reruns, everything downstream reruns too
    let mut reusable = previous.is_some();
    let mut reuse = |name: &str, manifest: &mut Manifest| -> bool {
        if !reusable {
            return false;
        }
        match previous.as_ref().and_then(|p| p.stage(name)) {
            Some(rec) if rec.is_intact(&dir) => {
                info!("stage {name}: outputs intact, skipping");
                manifest.record(rec.clone());
                skipped.push(name.to_string());
                true
            }
            _ => {
                reusable = false;
                false
            }
        }
    };

    let n = cfg.n_steps;
    let mut datasets: Vec<Option<SnapshotDataset>> = vec![None; n + 1];

    if !reuse("sample", &mut manifest) {
        let mut run = || -> Result<StageRecord> {
            info!(
                "sampling {} snapshots of {} at beta = {}",
                cfg.sampler.n_snapshots,
                cfg.model.describe(),
                cfg.sampler.beta
            );
            let (mut data, stats) = sample_with_stats(&cfg.model, &cfg.sampler)?;
            data.metadata
                .params
                .insert("n_chains".into(), cfg.sampler.n_chains.to_string());
            info!(
                "metropolis acceptance {:.4}, mean Wolff cluster {:.1}",
                stats.acceptance_rate(),
                stats.mean_cluster_size()
            );
            write_dataset(&data, dir.join(dataset_file(0)))?;
            let summary = json!({
                "model": cfg.model.describe(),
                "beta": cfg.sampler.beta,
                "n_snapshots": data.len(),
                "metropolis_acceptance": finite_or_null(stats.acceptance_rate()),
                "mean_cluster_size": finite_or_null(stats.mean_cluster_size()),
            });
            datasets[0] = Some(data);
            Ok(StageRecord::new(
                "sample",
                &dir,
                &[dataset_file(0)],
                summary,
            )?)
        };
        manifest.record(run().context("stage sample")?);
        manifest.save(&dir)?;
    }

    if !reuse("rg", &mut manifest) {
        let mut run = || -> Result<StageRecord> {
            load_datasets(&dir, 0, &mut datasets[..1])?;
            let flow = rg_flow(datasets[0].as_ref().expect("loaded"), n)?;
            let mut files = Vec::new();
            let mut bits = vec![datasets[0].as_ref().expect("loaded").bits_per_snapshot()];
            for (k, d) in flow.into_datasets().into_iter().enumerate().skip(1) {
                write_dataset(&d, dir.join(dataset_file(k)))?;
                files.push(dataset_file(k));
                bits.push(d.bits_per_snapshot());
                datasets[k] = Some(d);
            }
            Ok(StageRecord::new(
                "rg",
                &dir,
                &files,
                json!({ "bits_per_step": bits }),
            )?)
        };
        manifest.record(run().context("stage rg")?);
        manifest.save(&dir)?;
    }

    let mut degrees: Vec<Vec<u32>> = Vec::new();
    if !reuse("wfn", &mut manifest) {
        let mut run = || -> Result<StageRecord> {
            load_datasets(&dir, 0, &mut datasets)?;
            let mut files = Vec::new();
            let mut steps = Vec::new();
            for (k, d) in datasets.iter().enumerate() {
                let d = d.as_ref().expect("loaded");
                let unique = deduplicate(d);
                info!("step {k}: {} unique of {} snapshots", unique.len(), d.len());
                let r = build_wfn_with(&unique, &cfg.wfn).with_context(|| format!("step {k}"))?;
                write_file(&dir, &wfn_file(k), |w| r.write_tsv(w))?;
                files.push(wfn_file(k));
                let mean_degree =
                    r.degrees.iter().map(|&x| x as f64).sum::<f64>() / r.n_unique() as f64;
                steps.push(json!({
                    "step": k,
                    "n_snapshots": d.len(),
                    "n_unique": r.n_unique(),
                    "cutoff_r": r.cutoff(),
                    "r1_sum": r.r1_sum,
                    "edges": r.edge_count(),
                    "mean_degree": mean_degree,
                }));
                degrees.push(r.degrees);
            }
            Ok(StageRecord::new(
                "wfn",
                &dir,
                &files,
                json!({ "cutoff": cfg.wfn.cutoff, "steps": steps }),
            )?)
        };
        manifest.record(run().context("stage wfn")?);
        manifest.save(&dir)?;
    }

    if !reuse("analysis", &mut manifest) {
        let mut run = || -> Result<StageRecord> {
            if degrees.is_empty() {
                for k in 0..=n {
                    let path = dir.join(wfn_file(k));
                    let f =
                        File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    degrees.push(read_degrees(BufReader::new(f))?);
                }
            }
            let labels: Vec<String> = (0..=n).map(|k| format!("step{k}")).collect();
            let a = analyze_degrees(&labels, &degrees, cfg.bin_ratio, cfg.fit_window)?;
            let mut files = Vec::new();
            for (k, h) in a.histograms.iter().enumerate() {
                write_file(&dir, &histogram_file(k), |w| tables::write_histogram(w, h))?;
                files.push(histogram_file(k));
            }
            write_file(&dir, Path::new(FITS_FILE), |w| {
                tables::write_fits(w, &a.fits)
            })?;
            write_file(&dir, Path::new(KS_FILE), |w| {
                tables::write_matrix(w, &labels, &a.ks)
            })?;
            files.push(PathBuf::from(FITS_FILE));
            files.push(PathBuf::from(KS_FILE));
            let fits: Vec<_> = a
                .fits
                .iter()
                .map(|(l, f)| match f {
                    Ok(f) => json!({ "label": l, "fit": f }),
                    Err(e) => json!({ "label": l, "error": e }),
                })
                .collect();
            Ok(StageRecord::new(
                "analysis",
                &dir,
                &files,
                json!({ "fits": fits, "ks": a.ks }),
            )?)
        };
        manifest.record(run().context("stage analysis")?);
        manifest.save(&dir)?;
    }

    if !cfg.correlation_steps.is_empty() && !reuse("correlation", &mut manifest) {
        let mut run = || -> Result<StageRecord> {
            let eta = cfg.raw.correlation.eta;
            let mut files = Vec::new();
            let mut steps = Vec::new();
            for &k in &cfg.correlation_steps {
                load_datasets(&dir, k, &mut datasets[k..=k])?;
                let d = datasets[k].as_ref().expect("loaded");
                let c = correlation_function(d, cfg.raw.correlation.max_d)?;
                let rescaled = rescale_correlation(&c, eta);
                write_file(&dir, &correlation_file(k), |w| {
                    tables::write_correlation(w, &c, &rescaled, eta)
                })?;
                files.push(correlation_file(k));
                let xi = match correlation_length(&c) {
                    Ok(x) => json!(x),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                steps.push(json!({ "step": k, "correlation_length": xi }));
            }
            Ok(StageRecord::new(
                "correlation",
                &dir,
                &files,
                json!({ "eta": eta, "steps": steps }),
            )?)
        };
        manifest.record(run().context("stage correlation")?);
        manifest.save(&dir)?;
    }

    Ok(PipelineReport {
        output_dir: dir,
        manifest,
        skipped,
    })
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}
