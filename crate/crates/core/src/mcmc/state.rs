use rand::Rng;

use super::model::IsingModel;
use crate::dataset::Snapshot;
use crate::error::{Error, Result};

/// Spin configuration with incrementally maintained bond and field sums.
///
/// The sums are integers, so the cached energy is exact after any number
/// of updates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinState {
    pub(crate) spins: Snapshot,
    pub(crate) nn_sum: i64,
    pub(crate) nnn_sum: i64,
    pub(crate) magnetization: i64,
}

impl SpinState {
    pub fn from_snapshot(model: &IsingModel, spins: Snapshot) -> Result<Self> {
        if spins.n_bits() != model.num_sites() {
            return Err(Error::LatticeMismatch {
                expected: model.num_sites(),
                found: spins.n_bits(),
            });
        }
        let (nn_sum, nnn_sum, magnetization) = model.bond_sums(&spins);
        Ok(Self {
            spins,
            nn_sum,
            nnn_sum,
            magnetization,
        })
    }

    pub fn uniform(model: &IsingModel, up: bool) -> Self {
        let n = model.num_sites();
        let spins = if up {
            Snapshot::ones(n)
        } else {
            Snapshot::zeros(n)
        };
        Self::from_snapshot(model, spins).expect("sized from the model")
    }

    /// Independent fair coin per site.
    pub fn random<R: Rng + ?Sized>(model: &IsingModel, rng: &mut R) -> Self {
        let n = model.num_sites();
        let spins = Snapshot::from_bits((0..n).map(|_| rng.random::<bool>()));
        Self::from_snapshot(model, spins).expect("sized from the model")
    }

    pub fn spins(&self) -> &Snapshot {
        &self.spins
    }

    pub fn into_spins(self) -> Snapshot {
        self.spins
    }

    /// Total magnetization `sum_i s_i`.
    pub fn magnetization(&self) -> i64 {
        self.magnetization
    }

    /// Sum of `s_i s_j` over nearest-neighbor bonds.
    pub fn nn_bond_sum(&self) -> i64 {
        self.nn_sum
    }

    pub fn energy(&self, model: &IsingModel) -> f64 {
        model.energy_from_sums(self.nn_sum, self.nnn_sum, self.magnetization)
    }

    /// Whether the cached sums agree with a from-scratch recount.
    pub fn is_consistent(&self, model: &IsingModel) -> bool {
        model.bond_sums(&self.spins) == (self.nn_sum, self.nnn_sum, self.magnetization)
    }
}
