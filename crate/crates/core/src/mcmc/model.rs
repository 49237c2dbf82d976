use crate::dataset::Snapshot;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, NeighborTable};

/// Default next-nearest-neighbor coupling as a fraction of `J`.
pub const NNN_RATIO: f64 = 0.1;
/// Default longitudinal field as a fraction of `J`.
pub const FIELD_RATIO: f64 = 0.01;

/// Extra term added to the nearest-neighbor Ising Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    None,
    /// `-J2 * sum_<<ij>> s_i s_j` over diagonal bonds (2D only).
    NextNearest(f64),
    /// `+h * sum_i s_i`.
    Field(f64),
}

/// `H(s) = -J sum_<ij> s_i s_j + V`, each bond counted once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub coupling: f64,
    pub perturbation: Perturbation,
}

impl Couplings {
    pub fn ferromagnet(coupling: f64) -> Self {
        Self {
            coupling,
            perturbation: Perturbation::None,
        }
    }

    /// `J = 1` plus next-nearest coupling `J/10`.
    pub fn with_next_nearest(coupling: f64) -> Self {
        Self {
            coupling,
            perturbation: Perturbation::NextNearest(NNN_RATIO * coupling),
        }
    }

    /// `J = 1` plus longitudinal field `J/100`.
    pub fn with_field(coupling: f64) -> Self {
        Self {
            coupling,
            perturbation: Perturbation::Field(FIELD_RATIO * coupling),
        }
    }

    pub fn next_nearest(&self) -> f64 {
        match self.perturbation {
            Perturbation::NextNearest(j2) => j2,
            _ => 0.0,
        }
    }

    pub fn field(&self) -> f64 {
        match self.perturbation {
            Perturbation::Field(h) => h,
            _ => 0.0,
        }
    }

    /// Invariant under a global spin flip.
    pub fn is_z2_symmetric(&self) -> bool {
        !matches!(self.perturbation, Perturbation::Field(h) if h != 0.0)
    }

    pub fn describe(&self) -> String {
        match self.perturbation {
            Perturbation::None => format!("ising J={}", self.coupling),
            Perturbation::NextNearest(j2) => format!("ising J={} nnn={j2}", self.coupling),
            Perturbation::Field(h) => format!("ising J={} field={h}", self.coupling),
        }
    }
}

/// A classical Ising model bound to a lattice, with precomputed adjacency.
#[derive(Debug, Clone)]
pub struct IsingModel {
    lattice: LatticeSpec,
    couplings: Couplings,
    nn: NeighborTable,
    nnn: Option<NeighborTable>,
    nn_adjacency: Vec<u32>,
    nnn_adjacency: Vec<u32>,
}

impl IsingModel {
    pub fn new(lattice: LatticeSpec, couplings: Couplings) -> Result<Self> {
        if !(couplings.coupling.is_finite() && couplings.coupling > 0.0) {
            return Err(Error::InvalidModel(format!(
                "coupling must be positive and finite, got {}",
                couplings.coupling
            )));
        }
        let nnn = match couplings.perturbation {
            Perturbation::None => None,
            Perturbation::NextNearest(j2) => {
                if !(j2.is_finite() && j2 >= 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "next-nearest coupling must be non-negative, got {j2}"
                    )));
                }
                Some(NeighborTable::new(&lattice, 2)?)
            }
            Perturbation::Field(h) => {
                if !h.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "field must be finite, got {h}"
                    )));
                }
                None
            }
        };
        if lattice.num_sites() > u32::MAX as usize {
            return Err(Error::InvalidModel("lattice too large".into()));
        }
        let nn = NeighborTable::new(&lattice, 1)?;
        let to_u32 = |v: Vec<usize>| v.into_iter().map(|x| x as u32).collect::<Vec<_>>();
        let nn_adjacency = to_u32(nn.full_adjacency());
        let nnn_adjacency = nnn
            .as_ref()
            .map(|t| to_u32(t.full_adjacency()))
            .unwrap_or_default();
        Ok(Self {
            lattice,
            couplings,
            nn,
            nnn,
            nn_adjacency,
            nnn_adjacency,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    pub fn num_sites(&self) -> usize {
        self.lattice.num_sites()
    }

    pub fn describe(&self) -> String {
        self.couplings.describe()
    }

    /// Coordination number for nearest-neighbor bonds.
    pub fn nn_degree(&self) -> usize {
        2 * self.nn.per_site()
    }

    pub fn nnn_degree(&self) -> usize {
        self.nnn.as_ref().map_or(0, |t| 2 * t.per_site())
    }

    #[inline]
    pub(crate) fn nn_of(&self, site: usize) -> &[u32] {
        let z = self.nn_degree();
        &self.nn_adjacency[site * z..(site + 1) * z]
    }

    #[inline]
    pub(crate) fn nnn_of(&self, site: usize) -> &[u32] {
        let z = self.nnn_degree();
        &self.nnn_adjacency[site * z..(site + 1) * z]
    }

    /// `(sum over nn bonds of s_i s_j, same over nnn bonds, sum of s_i)`.
    pub fn bond_sums(&self, spins: &Snapshot) -> (i64, i64, i64) {
        let bond_sum = |table: &NeighborTable| -> i64 {
            table
                .bonds()
                .map(|(i, j)| i64::from(spins.spin(i) * spins.spin(j)))
                .sum()
        };
        let nn = bond_sum(&self.nn);
        let nnn = self.nnn.as_ref().map_or(0, bond_sum);
        (nn, nnn, spins.magnetization())
    }

    pub fn energy_from_sums(&self, nn: i64, nnn: i64, magnetization: i64) -> f64 {
        -self.couplings.coupling * nn as f64 - self.couplings.next_nearest() * nnn as f64
            + self.couplings.field() * magnetization as f64
    }
}

/// Energy of a configuration, recomputed from scratch.
pub fn energy(model: &IsingModel, spins: &Snapshot) -> Result<f64> {
    if spins.n_bits() != model.num_sites() {
        return Err(Error::LatticeMismatch {
            expected: model.num_sites(),
            found: spins.n_bits(),
        });
    }
    let (nn, nnn, m) = model.bond_sums(spins);
    Ok(model.energy_from_sums(nn, nnn, m))
}
