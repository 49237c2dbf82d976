use rand::Rng;

use super::model::IsingModel;
use super::state::SpinState;
use crate::error::{Error, Result};

/// Wolff single-cluster update.
///
/// The cluster grows from a random seed across nearest-neighbor bonds with
/// probability `1 - exp(-2 beta J)` and, when present, across diagonal bonds
/// with `1 - exp(-2 beta J2)`. Both couplings are ferromagnetic, so the flip
/// is rejection-free. Models with a longitudinal field are refused.
#[derive(Debug, Clone)]
pub struct Wolff {
    p_nn: f64,
    p_nnn: f64,
    /// Adhesion probabilities scaled to `2^64`.
    t_nn: u64,
    t_nnn: u64,
    stack: Vec<u32>,
    cluster: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
}

impl Wolff {
    pub fn new(model: &IsingModel, beta: f64) -> Result<Self> {
        if !model.couplings().is_z2_symmetric() {
            return Err(Error::WolffWithField);
        }
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "beta must be >= 0, got {beta}"
            )));
        }
        let c = model.couplings();
        let adhesion = |j: f64| {
            if j == 0.0 {
                0.0
            } else {
                -(-2.0 * beta * j).exp_m1()
            }
        };
        let (p_nn, p_nnn) = (adhesion(c.coupling), adhesion(c.next_nearest()));
        let scaled = |p: f64| {
            if p >= 1.0 {
                u64::MAX
            } else {
                (p * 2f64.powi(64)) as u64
            }
        };
        Ok(Self {
            p_nn,
            p_nnn,
            t_nn: scaled(p_nn),
            t_nnn: scaled(p_nnn),
            stack: Vec::new(),
            cluster: Vec::new(),
            mark: vec![0; model.num_sites()],
            stamp: 0,
        })
    }

    pub fn adhesion(&self) -> (f64, f64) {
        (self.p_nn, self.p_nnn)
    }

    #[inline]
    fn grow<R: Rng + ?Sized>(
        &mut self,
        neighbors: &[u32],
        t: u64,
        up: bool,
        state: &SpinState,
        rng: &mut R,
    ) {
        for &j in neighbors {
            let ju = j as usize;
            if self.mark[ju] != self.stamp && state.spins.bit(ju) == up && rng.next_u64() < t {
                self.mark[ju] = self.stamp;
                self.stack.push(j);
            }
        }
    }

    /// Grows and flips one cluster; returns its size.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        model: &IsingModel,
        state: &mut SpinState,
        rng: &mut R,
    ) -> usize {
        let n = model.num_sites();
        debug_assert_eq!(self.mark.len(), n);
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.fill(0);
            self.stamp = 1;
        }
        let seed = rng.random_range(0..n);
        let up = state.spins.bit(seed);
        self.stack.clear();
        self.cluster.clear();
        self.mark[seed] = self.stamp;
        self.stack.push(seed as u32);
        while let Some(i) = self.stack.pop() {
            self.cluster.push(i);
            let i = i as usize;
            self.grow(model.nn_of(i), self.t_nn, up, state, rng);
            if self.t_nnn > 0 {
                self.grow(model.nnn_of(i), self.t_nnn, up, state, rng);
            }
        }

        // Only bonds crossing the cluster boundary change sign.
        let s = if up { 1i64 } else { -1 };
        let boundary = |neighbors: &[u32], mark: &[u32], stamp: u32| -> i64 {
            neighbors
                .iter()
                .filter(|&&j| mark[j as usize] != stamp)
                .map(|&j| i64::from(state.spins.spin(j as usize)))
                .sum()
        };
        let mut d_nn = 0i64;
        let mut d_nnn = 0i64;
        for &i in &self.cluster {
            let i = i as usize;
            d_nn += boundary(model.nn_of(i), &self.mark, self.stamp);
            d_nnn += boundary(model.nnn_of(i), &self.mark, self.stamp);
        }
        for &i in &self.cluster {
            state.spins.flip(i as usize);
        }
        let size = self.cluster.len();
        state.nn_sum -= 2 * s * d_nn;
        state.nnn_sum -= 2 * s * d_nnn;
        state.magnetization -= 2 * s * size as i64;
        size
    }
}

/// One Wolff cluster flip; returns the cluster size.
pub fn wolff_update<R: Rng + ?Sized>(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    rng: &mut R,
) -> Result<usize> {
    Ok(Wolff::new(model, beta)?.update(model, state, rng))
}
