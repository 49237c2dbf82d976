use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::metropolis::Metropolis;
use super::model::IsingModel;
use super::state::SpinState;
use super::wolff::Wolff;
use crate::dataset::{Metadata, SnapshotDataset};
use crate::error::{Error, Result};

/// Independent stream `chain` of the generator seeded with `seed`.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub beta: f64,
    pub n_snapshots: usize,
    pub thermalization_sweeps: usize,
    /// Update slots between two recorded snapshots.
    pub decorrelation_sweeps: usize,
    pub n_chains: usize,
    /// Fraction of update slots spent on a Wolff cluster flip; the rest are
    /// Metropolis sweeps. `0.5` alternates the two.
    pub wolff_fraction: f64,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(beta: f64, n_snapshots: usize) -> Self {
        Self {
            beta,
            n_snapshots,
            thermalization_sweeps: 1000,
            decorrelation_sweeps: 10,
            n_chains: 4,
            wolff_fraction: 0.5,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: String| Err(Error::InvalidConfig { field, reason });
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return bad(
                "beta",
                format!("must be finite and >= 0, got {}", self.beta),
            );
        }
        if self.n_snapshots == 0 {
            return bad("n_snapshots", "must be positive".into());
        }
        if self.decorrelation_sweeps == 0 {
            return bad("decorrelation_sweeps", "must be positive".into());
        }
        if self.n_chains == 0 {
            return bad("n_chains", "must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.wolff_fraction) {
            return bad(
                "mix",
                format!("must lie in [0, 1], got {}", self.wolff_fraction),
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SamplerStats {
    pub metropolis_sweeps: u64,
    pub metropolis_proposals: u64,
    pub metropolis_accepted: u64,
    pub wolff_updates: u64,
    pub wolff_flipped: u64,
}

impl SamplerStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.metropolis_proposals == 0 {
            f64::NAN
        } else {
            self.metropolis_accepted as f64 / self.metropolis_proposals as f64
        }
    }

    pub fn mean_cluster_size(&self) -> f64 {
        if self.wolff_updates == 0 {
            f64::NAN
        } else {
            self.wolff_flipped as f64 / self.wolff_updates as f64
        }
    }

    fn merge(&mut self, other: &SamplerStats) {
        self.metropolis_sweeps += other.metropolis_sweeps;
        self.metropolis_proposals += other.metropolis_proposals;
        self.metropolis_accepted += other.metropolis_accepted;
        self.wolff_updates += other.wolff_updates;
        self.wolff_flipped += other.wolff_flipped;
    }
}

/// One Markov chain interleaving Metropolis sweeps and Wolff flips.
pub struct Chain<'m> {
    model: &'m IsingModel,
    state: SpinState,
    rng: ChaCha8Rng,
    metropolis: Metropolis,
    wolff: Option<Wolff>,
    wolff_fraction: f64,
    slot: u64,
    stats: SamplerStats,
}

impl<'m> Chain<'m> {
    /// Starts from a random configuration drawn from `rng`.
    pub fn new(
        model: &'m IsingModel,
        beta: f64,
        wolff_fraction: f64,
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        let metropolis = Metropolis::new(model, beta)?;
        let wolff = if wolff_fraction > 0.0 {
            Some(Wolff::new(model, beta)?)
        } else {
            None
        };
        let state = SpinState::random(model, &mut rng);
        Ok(Self {
            model,
            state,
            rng,
            metropolis,
            wolff,
            wolff_fraction,
            slot: 0,
            stats: SamplerStats::default(),
        })
    }

    /// Runs one update slot: a Wolff flip on a `wolff_fraction` share of
    /// slots, spread evenly, and a Metropolis sweep otherwise.
    pub fn step(&mut self) {
        let t = self.slot as f64;
        let use_wolff =
            ((t + 1.0) * self.wolff_fraction).floor() > (t * self.wolff_fraction).floor();
        self.slot += 1;
        match (&mut self.wolff, use_wolff) {
            (Some(w), true) => {
                let size = w.update(self.model, &mut self.state, &mut self.rng);
                self.stats.wolff_updates += 1;
                self.stats.wolff_flipped += size as u64;
            }
            _ => {
                let acc = self
                    .metropolis
                    .sweep(self.model, &mut self.state, &mut self.rng);
                self.stats.metropolis_sweeps += 1;
                self.stats.metropolis_proposals += self.model.num_sites() as u64;
                self.stats.metropolis_accepted += acc as u64;
            }
        }
    }

    pub fn run(&mut self, slots: usize) {
        for _ in 0..slots {
            self.step();
        }
    }

    pub fn state(&self) -> &SpinState {
        &self.state
    }

    pub fn stats(&self) -> &SamplerStats {
        &self.stats
    }
}

/// Draws `n_snapshots` configurations from `exp(-beta H) / Z`.
pub fn sample_snapshots(model: &IsingModel, config: &SamplerConfig) -> Result<SnapshotDataset> {
    sample_with_stats(model, config).map(|(d, _)| d)
}

/// Like [`sample_snapshots`], also returning update statistics. Chains run
/// in parallel; their outputs are concatenated in chain order.
pub fn sample_with_stats(
    model: &IsingModel,
    config: &SamplerConfig,
) -> Result<(SnapshotDataset, SamplerStats)> {
    config.validate()?;
    if config.wolff_fraction > 0.0 && !model.couplings().is_z2_symmetric() {
        return Err(Error::WolffWithField);
    }
    let per_chain = config.n_snapshots / config.n_chains;
    let extra = config.n_snapshots % config.n_chains;
    let chains = (0..config.n_chains)
        .into_par_iter()
        .map(|c| {
            let quota = per_chain + usize::from(c < extra);
            let mut chain = Chain::new(
                model,
                config.beta,
                config.wolff_fraction,
                chain_rng(config.seed, c as u64),
            )?;
            chain.run(config.thermalization_sweeps);
            let mut out = Vec::with_capacity(quota);
            for _ in 0..quota {
                chain.run(config.decorrelation_sweeps);
                out.push(chain.state().spins().clone());
            }
            Ok((out, chain.stats))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut stats = SamplerStats::default();
    let mut snapshots = Vec::with_capacity(config.n_snapshots);
    for (snaps, s) in chains {
        snapshots.extend(snaps);
        stats.merge(&s);
    }

    let mut metadata = Metadata::sampled(model.describe(), config.beta, config.seed);
    let params = [
        (
            "thermalization_sweeps",
            config.thermalization_sweeps.to_string(),
        ),
        (
            "decorrelation_sweeps",
            config.decorrelation_sweeps.to_string(),
        ),
        ("n_chains", config.n_chains.to_string()),
        ("mix", config.wolff_fraction.to_string()),
    ];
    metadata
        .params
        .extend(params.into_iter().map(|(k, v)| (k.to_string(), v)));
    let dataset = SnapshotDataset::new(model.lattice().clone(), 0, snapshots, metadata)?;
    Ok((dataset, stats))
}
