use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use snaprg::dataset::SymbolMapping;
use snaprg::stats::DEFAULT_BIN_RATIO;
use snaprg::wfn::DEFAULT_BLOCK_SIZE;
use snaprg::{CutoffRule, LatticeSpec, WfnConfig};
use snaprg_cli::commands::{self, AnalyzeRequest};
use snaprg_cli::{run_pipeline, PipelineOptions, RunConfig, ValidatedConfig};

/// Ising snapshot sampling, decimation of snapshot datasets, and
/// wave-function-network analysis.
#[derive(Parser)]
#[command(name = "snaprg", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample snapshots of the model described by a config file.
    Sample {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `<io.output_dir>/dataset_step0.snaprg`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Convert a text file of configurations (one per line) into a dataset.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Side lengths, x first, e.g. `16,16`.
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        /// `pm` for +1/-1 tokens, `01` for 1/0 tokens.
        #[arg(long, default_value = "pm")]
        mapping: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Apply decimation steps to a dataset, one output file per step.
    Rg {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Build the wave-function network of a dataset and write its degrees.
    Wfn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        wfn: WfnFlags,
    },
    /// Histograms, power-law fits, KS matrix and correlation tables.
    Analyze {
        /// Degree tables written by `wfn`.
        #[arg(long, num_args = 1..)]
        degrees: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BIN_RATIO)]
        bin_ratio: f64,
        /// Fixed fit window `K_LOW K_HIGH`; automatic when absent.
        #[arg(long, num_args = 2, value_names = ["K_LOW", "K_HIGH"])]
        fit_window: Option<Vec<f64>>,
        /// Datasets whose spin-spin correlations to measure.
        #[arg(long, num_args = 1..)]
        correlations: Vec<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_d: usize,
        /// Exponent of the `lambda^(n eta)` rescaling.
        #[arg(long, default_value_t = 0.25)]
        eta: f64,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Run sample, rg, wfn, analysis and correlation stages from a config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Skip stages whose recorded outputs are intact.
        #[arg(long)]
        resume: bool,
        /// Overrides `io.output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Count pairs with `D <= R` as edges instead of `D < R`.
        #[arg(long)]
        cutoff_inclusive: bool,
    },
}

#[derive(Args)]
struct WfnFlags {
    /// Count pairs with `D <= R` as edges instead of `D < R`.
    #[arg(long)]
    cutoff_inclusive: bool,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
}

fn load_config(path: &Path) -> Result<ValidatedConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = RunConfig::from_toml(&text).context("invalid config")?;
    cfg.validate().context("invalid config")
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring threads")?;
    }
    match cli.command {
        Command::Sample { config, output } => {
            let cfg = load_config(&config)?;
            let out = output.unwrap_or_else(|| {
                cfg.raw
                    .io
                    .output_dir
                    .join(snaprg_cli::pipeline::dataset_file(0))
            });
            commands::cmd_sample(&cfg, &out).context("stage sample")?;
            println!("{}", out.display());
        }
        Command::Ingest {
            input,
            lengths,
            mapping,
            output,
        } => {
            let mapping: SymbolMapping = mapping.parse()?;
            let lattice = LatticeSpec::new(lengths.len(), &lengths)?;
            let d =
                commands::cmd_ingest(&input, &lattice, mapping, &output).context("stage ingest")?;
            println!("{}\t{} snapshots", output.display(), d.len());
        }
        Command::Rg {
            input,
            steps,
            output_dir,
        } => {
            for p in commands::cmd_rg(&input, steps, &output_dir).context("stage rg")? {
                println!("{}", p.display());
            }
        }
        Command::Wfn { input, output, wfn } => {
            let config = WfnConfig {
                cutoff: if wfn.cutoff_inclusive {
                    CutoffRule::Inclusive
                } else {
                    CutoffRule::Strict
                },
                block_size: wfn.block_size,
                isa: None,
            };
            let r = commands::cmd_wfn(&input, &output, &config).context("stage wfn")?;
            println!(
                "n_unique\t{}\nR\t{}\nedges\t{}",
                r.n_unique(),
                r.cutoff(),
                r.edge_count()
            );
        }
        Command::Analyze {
            degrees,
            bin_ratio,
            fit_window,
            correlations,
            max_d,
            eta,
            output_dir,
        } => {
            let req = AnalyzeRequest {
                degree_files: degrees,
                bin_ratio,
                fit_window: fit_window.map(|w| (w[0], w[1])),
                correlation_files: correlations,
                max_d,
                eta,
                out_dir: output_dir,
            };
            for p in commands::cmd_analyze(&req).context("stage analyze")? {
                println!("{}", p.display());
            }
        }
        Command::Pipeline {
            config,
            resume,
            output_dir,
            cutoff_inclusive,
        } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut raw = RunConfig::from_toml(&text).context("invalid config")?;
            if let Some(dir) = output_dir {
                raw.io.output_dir = dir;
            }
            if cutoff_inclusive {
                raw.wfn.cutoff = CutoffRule::Inclusive;
            }
            let cfg = raw.validate().context("invalid config")?;
            let report = run_pipeline(&cfg, PipelineOptions { resume })?;
            for s in &report.skipped {
                eprintln!("reused stage {s}");
            }
            println!(
                "{}",
                report
                    .output_dir
                    .join(snaprg_cli::manifest::MANIFEST_FILE)
                    .display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
