//! Snapshot datasets: the in-memory model, the `SNAPRG01` binary format,
//! plain-text ingestion and deduplication.

mod dedup;
mod format;
mod ingest;
mod snapshot;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, SiteMask};

pub use dedup::{deduplicate, DedupDataset};
pub use format::{read_dataset, write_dataset, MAGIC};
pub use ingest::{ingest_text, parse_text, SymbolMapping};
pub use snapshot::{words_for, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Sampled,
    Ingested,
}

/// Provenance carried alongside the snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub source: Source,
    /// Human-readable model description, e.g. `ising J=1 nnn=0.1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Free-form origin tag for ingested data (file name, experiment id).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Creation parameters (sweep counts, mixing fraction, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl Metadata {
    pub fn sampled(model: impl Into<String>, beta: f64, seed: u64) -> Self {
        Self {
            source: Source::Sampled,
            model: Some(model.into()),
            beta: Some(beta),
            source_tag: None,
            seed: Some(seed),
            params: BTreeMap::new(),
        }
    }

    pub fn ingested(tag: impl Into<String>) -> Self {
        Self {
            source: Source::Ingested,
            model: None,
            beta: None,
            source_tag: Some(tag.into()),
            seed: None,
            params: BTreeMap::new(),
        }
    }
}

/// An ordered list of snapshots on a (possibly decimated) lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotDataset {
    lattice: LatticeSpec,
    n_steps_applied: usize,
    snapshots: Vec<Snapshot>,
    pub metadata: Metadata,
}

impl SnapshotDataset {
    pub fn new(
        lattice: LatticeSpec,
        n_steps_applied: usize,
        snapshots: Vec<Snapshot>,
        metadata: Metadata,
    ) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::EmptyInput("a dataset needs at least one snapshot"));
        }
        let expected = SiteMask::new(&lattice, n_steps_applied)?.len();
        if let Some(bad) = snapshots.iter().find(|s| s.n_bits() != expected) {
            return Err(Error::LatticeMismatch {
                expected,
                found: bad.n_bits(),
            });
        }
        Ok(Self {
            lattice,
            n_steps_applied,
            snapshots,
            metadata,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn n_steps_applied(&self) -> usize {
        self.n_steps_applied
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<Snapshot> {
        self.snapshots
    }

    /// `N_r`.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn bits_per_snapshot(&self) -> usize {
        self.snapshots[0].n_bits()
    }

    /// Mask describing which original sites the bits refer to.
    pub fn mask(&self) -> SiteMask {
        SiteMask::new(&self.lattice, self.n_steps_applied).expect("validated at construction")
    }
}
