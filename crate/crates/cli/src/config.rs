//! TOML run configuration and its validation.
//!
//! ```toml
//! [lattice]
//! dimension = 2
//! lengths = [64, 64]
//!
//! [model]
//! perturbation = "none"      # "none" | "nnn" | "field"
//!
//! [sampler]
//! t_over_tc = 1.0            # or `beta = ...` or `temperature = ...`
//! n_snapshots = 10000
//! seed = 7
//!
//! [rg]
//! n_steps = 4
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use snaprg::lattice::SiteMask;
use snaprg::mcmc::{
    reference_tc, Couplings, IsingModel, Perturbation, SamplerConfig, FIELD_RATIO, NNN_RATIO,
};
use snaprg::stats::DEFAULT_BIN_RATIO;
use snaprg::wfn::DEFAULT_BLOCK_SIZE;
use snaprg::{CutoffRule, LatticeSpec, WfnConfig};

/// A validation failure, tagged with the dotted path of the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    #[serde(default)]
    pub model: ModelSection,
    pub sampler: SamplerSection,
    #[serde(default)]
    pub rg: RgSection,
    #[serde(default)]
    pub wfn: WfnSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub correlation: CorrelationSection,
    #[serde(default)]
    pub io: IoSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub dimension: usize,
    pub lengths: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    #[default]
    None,
    Nnn,
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default)]
    pub perturbation: PerturbationKind,
    /// Overrides the default `J2 = J/10` or `h = J/100`.
    #[serde(default)]
    pub strength: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            coupling: 1.0,
            perturbation: PerturbationKind::None,
            strength: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub temperature: Option<f64>,
    /// Temperature as a multiple of the nearest-neighbor model's `T_c`
    /// (exact in 2D, 4.512 J in 3D), whatever the perturbation.
    #[serde(default)]
    pub t_over_tc: Option<f64>,
    pub n_snapshots: usize,
    #[serde(default = "default_thermalization")]
    pub thermalization_sweeps: usize,
    #[serde(default = "default_decorrelation")]
    pub decorrelation_sweeps: usize,
    #[serde(default = "default_chains")]
    pub n_chains: usize,
    /// Fraction of Wolff updates; defaults to 0.5, or 0 for field models.
    #[serde(default)]
    pub mix: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_thermalization() -> usize {
    1000
}
fn default_decorrelation() -> usize {
    10
}
fn default_chains() -> usize {
    4
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RgSection {
    #[serde(default)]
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfnSection {
    #[serde(default)]
    pub cutoff: CutoffRule,
    #[serde(default = "default_bin_ratio")]
    pub bin_ratio: f64,
    #[serde(default = "default_block")]
    pub block_size: usize,
}

fn default_bin_ratio() -> f64 {
    DEFAULT_BIN_RATIO
}
fn default_block() -> usize {
    DEFAULT_BLOCK_SIZE
}

impl Default for WfnSection {
    fn default() -> Self {
        Self {
            cutoff: CutoffRule::Strict,
            bin_ratio: DEFAULT_BIN_RATIO,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// `[k_low, k_high]`; absent means automatic window selection.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSection {
    /// Largest separation; 0 disables the correlation stage.
    #[serde(default)]
    pub max_d: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// RG steps to measure; defaults to the even steps.
    #[serde(default)]
    pub steps: Option<Vec<usize>>,
}

fn default_eta() -> f64 {
    0.25
}

impl Default for CorrelationSection {
    fn default() -> Self {
        Self {
            max_d: 0,
            eta: 0.25,
            steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSection {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("snaprg-out")
}

impl Default for IoSection {
    fn default() -> Self {
        Self {
            output_dir: default_output(),
        }
    }
}

/// A configuration whose every setting has been checked against the
/// library's preconditions.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub raw: RunConfig,
    pub lattice: LatticeSpec,
    pub model: IsingModel,
    pub sampler: SamplerConfig,
    pub n_steps: usize,
    pub wfn: WfnConfig,
    pub bin_ratio: f64,
    pub fit_window: Option<(f64, f64)>,
    /// Empty when correlations are disabled.
    pub correlation_steps: Vec<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| locate_key(text, s)).unwrap_or_default();
            invalid(
                if field.is_empty() { "config" } else { &field },
                e.message().to_string(),
            )
        })
    }

    pub fn validate(&self) -> Result<ValidatedConfig, ConfigError> {
        let l = &self.lattice;
        if !(l.dimension == 2 || l.dimension == 3) {
            return Err(invalid(
                "lattice.dimension",
                format!("must be 2 or 3, got {}", l.dimension),
            ));
        }
        if l.lengths.len() != l.dimension {
            return Err(invalid(
                "lattice.lengths",
                format!("expected {} lengths, got {}", l.dimension, l.lengths.len()),
            ));
        }
        if let Some(bad) = l.lengths.iter().find(|&&n| n < 4 || n % 2 != 0) {
            return Err(invalid(
                "lattice.lengths",
                format!("lengths must be even and >= 4, got {bad}"),
            ));
        }
        let lattice = LatticeSpec::new(l.dimension, &l.lengths)
            .map_err(|e| invalid("lattice", e.to_string()))?;

        let m = &self.model;
        if !(m.coupling.is_finite() && m.coupling > 0.0) {
            return Err(invalid(
                "model.coupling",
                format!("must be positive, got {}", m.coupling),
            ));
        }
        if let Some(s) = m.strength {
            if !s.is_finite() {
                return Err(invalid("model.strength", "must be finite"));
            }
            if m.perturbation == PerturbationKind::None {
                return Err(invalid("model.strength", "given without a perturbation"));
            }
            if m.perturbation == PerturbationKind::Nnn && s < 0.0 {
                return Err(invalid(
                    "model.strength",
                    "next-nearest coupling must be ferromagnetic (>= 0)",
                ));
            }
        }
        let perturbation = match m.perturbation {
            PerturbationKind::None => Perturbation::None,
            PerturbationKind::Nnn => {
                if l.dimension != 2 {
                    return Err(invalid(
                        "model.perturbation",
                        "next-nearest coupling is defined in 2D only",
                    ));
                }
                Perturbation::NextNearest(m.strength.unwrap_or(NNN_RATIO * m.coupling))
            }
            PerturbationKind::Field => {
                Perturbation::Field(m.strength.unwrap_or(FIELD_RATIO * m.coupling))
            }
        };
        let couplings = Couplings {
            coupling: m.coupling,
            perturbation,
        };
        let model = IsingModel::new(lattice.clone(), couplings)
            .map_err(|e| invalid("model", e.to_string()))?;

        let s = &self.sampler;
        let beta = match (s.beta, s.temperature, s.t_over_tc) {
            (Some(b), None, None) => {
                if !(b.is_finite() && b >= 0.0) {
                    return Err(invalid(
                        "sampler.beta",
                        format!("must be finite and >= 0, got {b}"),
                    ));
                }
                b
            }
            (None, Some(t), None) => {
                if !(t.is_finite() && t > 0.0) {
                    return Err(invalid(
                        "sampler.temperature",
                        format!("must be positive, got {t}"),
                    ));
                }
                1.0 / t
            }
            (None, None, Some(f)) => {
                if !(f.is_finite() && f > 0.0) {
                    return Err(invalid(
                        "sampler.t_over_tc",
                        format!("must be positive, got {f}"),
                    ));
                }
                let tc = reference_tc(l.dimension).expect("dimension checked") * m.coupling;
                1.0 / (f * tc)
            }
            _ => {
                return Err(invalid(
                    "sampler",
                    "give exactly one of beta, temperature or t_over_tc",
                ))
            }
        };
        let check_positive = |field: &str, v: usize| {
            if v == 0 {
                Err(invalid(field, "must be positive"))
            } else {
                Ok(())
            }
        };
        check_positive("sampler.n_snapshots", s.n_snapshots)?;
        check_positive("sampler.decorrelation_sweeps", s.decorrelation_sweeps)?;
        check_positive("sampler.n_chains", s.n_chains)?;
        let symmetric = couplings.is_z2_symmetric();
        let mix = s.mix.unwrap_or(if symmetric { 0.5 } else { 0.0 });
        if !(0.0..=1.0).contains(&mix) {
            return Err(invalid(
                "sampler.mix",
                format!("must lie in [0, 1], got {mix}"),
            ));
        }
        if mix > 0.0 && !symmetric {
            return Err(invalid(
                "sampler.mix",
                "Wolff updates are unavailable with a longitudinal field; set mix = 0",
            ));
        }
        let sampler = SamplerConfig {
            beta,
            n_snapshots: s.n_snapshots,
            thermalization_sweeps: s.thermalization_sweeps,
            decorrelation_sweeps: s.decorrelation_sweeps,
            n_chains: s.n_chains,
            wolff_fraction: mix,
            seed: s.seed,
        };

        let max_steps = SiteMask::max_steps(&lattice);
        if self.rg.n_steps > max_steps {
            return Err(invalid(
                "rg.n_steps",
                format!(
                    "lattice {:?} supports at most {max_steps} steps, got {}",
                    l.lengths, self.rg.n_steps
                ),
            ));
        }

        let w = &self.wfn;
        if !(w.bin_ratio.is_finite() && w.bin_ratio > 1.0) {
            return Err(invalid(
                "wfn.bin_ratio",
                format!("must exceed 1, got {}", w.bin_ratio),
            ));
        }
        check_positive("wfn.block_size", w.block_size)?;

        let fit_window = match self.fit.window {
            Some([lo, hi]) => {
                if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                    return Err(invalid(
                        "fit.window",
                        format!("need 0 < k_low < k_high, got [{lo}, {hi}]"),
                    ));
                }
                Some((lo, hi))
            }
            None => None,
        };

        let c = &self.correlation;
        let correlation_steps = if c.max_d == 0 {
            Vec::new()
        } else {
            if !c.eta.is_finite() {
                return Err(invalid("correlation.eta", "must be finite"));
            }
            let steps = c
                .steps
                .clone()
                .unwrap_or_else(|| (0..=self.rg.n_steps).filter(|k| k % 2 == 0).collect());
            for &k in &steps {
                if k > self.rg.n_steps {
                    return Err(invalid(
                        "correlation.steps",
                        format!("step {k} exceeds rg.n_steps = {}", self.rg.n_steps),
                    ));
                }
                let mask = SiteMask::new(&lattice, k)
                    .map_err(|e| invalid("correlation.steps", e.to_string()))?;
                let period = mask
                    .frame()
                    .vectors()
                    .iter()
                    .map(|e| mask.period_along(e))
                    .min()
                    .expect("nonempty frame");
                if 2 * c.max_d > period {
                    return Err(invalid(
                        "correlation.max_d",
                        format!(
                            "{} exceeds half the period {period} of the step-{k} frame",
                            c.max_d
                        ),
                    ));
                }
            }
            steps
        };

        Ok(ValidatedConfig {
            raw: self.clone(),
            lattice,
            model,
            sampler,
            n_steps: self.rg.n_steps,
            wfn: WfnConfig {
                cutoff: w.cutoff,
                block_size: w.block_size,
                isa: None,
            },
            bin_ratio: w.bin_ratio,
            fit_window,
            correlation_steps,
        })
    }
}

/// Dotted key path of the table entry enclosing byte offset `span`.
fn locate_key(text: &str, span: std::ops::Range<usize>) -> String {
    let before = &text[..span.start.min(text.len())];
    let mut table = String::new();
    let mut key = String::new();
    for line in before.lines() {
        let t = line.trim();
        if t.starts_with('[') && t.ends_with(']') {
            table = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = t.split_once('=') {
            key = k.trim().to_string();
        }
    }
    // the offending line itself may hold the key or be a table header
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[line_start..]
        .find('\n')
        .map_or(text.len(), |i| line_start + i);
    let line = text[line_start..line_end].trim();
    if line.starts_with('[') {
        return line
            .trim_matches(|c| c == '[' || c == ']')
            .trim()
            .to_string();
    }
    if let Some((k, _)) = line.split_once('=') {
        key = k.trim().to_string();
    }
    match (table.is_empty(), key.is_empty()) {
        (true, _) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}
