//! Snapshot-based renormalization of classical spin systems.
//!
//! Ising snapshots are sampled ([`mcmc`]), decimated site-by-site ([`rg`],
//! with masks from [`lattice`]), turned into wave-function networks
//! ([`wfn`]) and analysed ([`stats`]).

pub mod dataset;
pub mod error;
pub mod lattice;
pub mod mcmc;
pub mod rg;
pub mod stats;
pub mod wfn;

pub use dataset::{
    deduplicate, read_dataset, write_dataset, DedupDataset, Metadata, Snapshot, SnapshotDataset,
};
pub use error::{Error, Result};
pub use lattice::{Frame, LatticeSpec, NeighborTable, SiteMask};
pub use mcmc::{Couplings, IsingModel, SamplerConfig};
pub use rg::{apply_rg, rg_flow, RgFlow};
pub use wfn::{
    build_wfn, build_wfn_with, degree_samples, hamming, CutoffRule, WfnConfig, WfnResult,
};
