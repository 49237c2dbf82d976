use rand::Rng;

use super::model::IsingModel;
use super::state::SpinState;
use crate::error::{Error, Result};

/// Single-spin-flip Metropolis kernel with a precomputed acceptance table.
///
/// A flip of `s_i` changes the energy by
/// `2 s_i (J h_nn + J2 h_nnn) - 2 h s_i`, where `h_nn`, `h_nnn` are the local
/// neighbor sums, so the acceptance probability only depends on
/// `(s_i, h_nn, h_nnn)`.
#[derive(Debug, Clone)]
pub struct Metropolis {
    beta: f64,
    nn_degree: usize,
    nnn_degree: usize,
    /// Indexed by `((up * (z1+1) + (h_nn+z1)/2) * (z2+1) + (h_nnn+z2)/2`.
    acceptance: Vec<f64>,
    /// `acceptance * 2^64` for comparison against a raw 64-bit draw;
    /// `None` where the flip is always accepted.
    thresholds: Vec<Option<u64>>,
}

impl Metropolis {
    pub fn new(model: &IsingModel, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        let c = model.couplings();
        let (z1, z2) = (model.nn_degree(), model.nnn_degree());
        let mut acceptance = Vec::with_capacity(2 * (z1 + 1) * (z2 + 1));
        for up in [false, true] {
            let s = if up { 1.0 } else { -1.0 };
            for a in 0..=z1 {
                let h_nn = 2.0 * a as f64 - z1 as f64;
                for b in 0..=z2 {
                    let h_nnn = 2.0 * b as f64 - z2 as f64;
                    let delta = 2.0 * s * (c.coupling * h_nn + c.next_nearest() * h_nnn)
                        - 2.0 * c.field() * s;
                    acceptance.push((-beta * delta).exp().min(1.0));
                }
            }
        }
        let thresholds = acceptance
            .iter()
            .map(|&p| (p < 1.0).then(|| (p * 2f64.powi(64)) as u64))
            .collect();
        Ok(Self {
            beta,
            nn_degree: z1,
            nnn_degree: z2,
            acceptance,
            thresholds,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Table index for flipping `site`, with the numbers of up spins among
    /// its nearest and next-nearest neighbors.
    #[inline]
    fn lookup(&self, model: &IsingModel, state: &SpinState, site: usize) -> (usize, usize, usize) {
        let spins = &state.spins;
        let up = spins.bit(site);
        let a = model
            .nn_of(site)
            .iter()
            .filter(|&&j| spins.bit(j as usize))
            .count();
        let b = model
            .nnn_of(site)
            .iter()
            .filter(|&&j| spins.bit(j as usize))
            .count();
        let idx = ((usize::from(up) * (self.nn_degree + 1) + a) * (self.nnn_degree + 1)) + b;
        (idx, a, b)
    }

    /// Acceptance probability of a flip at `site`.
    pub fn probability(&self, model: &IsingModel, state: &SpinState, site: usize) -> f64 {
        self.acceptance[self.lookup(model, state, site).0]
    }

    /// One proposal at `site`; returns whether the flip was accepted.
    #[inline]
    pub fn propose<R: Rng + ?Sized>(
        &self,
        model: &IsingModel,
        state: &mut SpinState,
        site: usize,
        rng: &mut R,
    ) -> bool {
        let (idx, a, b) = self.lookup(model, state, site);
        if let Some(t) = self.thresholds[idx] {
            if rng.next_u64() >= t {
                return false;
            }
        }
        let h_nn = 2 * a as i64 - self.nn_degree as i64;
        let h_nnn = 2 * b as i64 - self.nnn_degree as i64;
        let s = i64::from(state.spins.spin(site));
        state.spins.flip(site);
        state.nn_sum -= 2 * s * h_nn;
        state.nnn_sum -= 2 * s * h_nnn;
        state.magnetization -= 2 * s;
        true
    }

    /// `N` proposals at uniformly random sites. Returns the accepted count.
    pub fn sweep<R: Rng + ?Sized>(
        &self,
        model: &IsingModel,
        state: &mut SpinState,
        rng: &mut R,
    ) -> usize {
        let n = model.num_sites();
        let mut accepted = 0;
        for _ in 0..n {
            let site = rng.random_range(0..n);
            accepted += usize::from(self.propose(model, state, site, rng));
        }
        accepted
    }
}

/// One Metropolis sweep; returns the number of accepted flips.
pub fn metropolis_sweep<R: Rng + ?Sized>(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    rng: &mut R,
) -> Result<usize> {
    Ok(Metropolis::new(model, beta)?.sweep(model, state, rng))
}
