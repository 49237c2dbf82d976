//! Decimation applied directly to snapshot datasets.
//!
//! Dropping the decimated sites from every snapshot turns samples of `P(s)`
//! into samples of the marginal `P'(s_A) = sum_{s_B} P(s_A s_B)` over the
//! retained sites. No renormalized Hamiltonian is constructed.

use rayon::prelude::*;

use crate::dataset::{Snapshot, SnapshotDataset};
use crate::error::{Error, Result};
use crate::lattice::SiteMask;

/// Restricts every snapshot to the sites retained by `mask`, which must be
/// one step beyond the dataset's current step. Output bit `k` is the `k`-th
/// retained site in increasing original index order.
pub fn apply_rg(dataset: &SnapshotDataset, mask: &SiteMask) -> Result<SnapshotDataset> {
    if mask.lattice() != dataset.lattice() || mask.n_steps() != dataset.n_steps_applied() + 1 {
        return Err(Error::FrameMismatch {
            dataset_steps: dataset.n_steps_applied(),
            mask_steps: mask.n_steps(),
        });
    }
    let positions = dataset.mask().step_positions(mask)?;
    let snapshots: Vec<Snapshot> = dataset
        .snapshots()
        .par_iter()
        .map(|s| s.project(&positions))
        .collect();
    let mut metadata = dataset.metadata.clone();
    metadata
        .params
        .insert("rg_steps".into(), mask.n_steps().to_string());
    SnapshotDataset::new(
        dataset.lattice().clone(),
        mask.n_steps(),
        snapshots,
        metadata,
    )
}

/// Datasets at successive decimation steps, each with its cumulative mask.
#[derive(Debug, Clone)]
pub struct RgFlow {
    steps: Vec<(SnapshotDataset, SiteMask)>,
}

impl RgFlow {
    pub fn steps(&self) -> &[(SnapshotDataset, SiteMask)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn dataset(&self, k: usize) -> &SnapshotDataset {
        &self.steps[k].0
    }

    pub fn into_datasets(self) -> Vec<SnapshotDataset> {
        self.steps.into_iter().map(|(d, _)| d).collect()
    }
}

/// Applies `n_max` consecutive steps starting from the dataset's own step.
/// Entry 0 is the input.
pub fn rg_flow(dataset: &SnapshotDataset, n_max: usize) -> Result<RgFlow> {
    let start = dataset.n_steps_applied();
    let available = SiteMask::max_steps(dataset.lattice());
    if start + n_max > available {
        return Err(Error::TooManySteps {
            requested: start + n_max,
            max: available,
            lengths: dataset.lattice().lengths().to_vec(),
        });
    }
    let mut steps = vec![(dataset.clone(), dataset.mask())];
    for k in 1..=n_max {
        let mask = SiteMask::new(dataset.lattice(), start + k)?;
        let next = apply_rg(&steps[k - 1].0, &mask)?;
        steps.push((next, mask));
    }
    Ok(RgFlow { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Metadata;
    use crate::lattice::LatticeSpec;
    use std::collections::HashMap;

    fn dataset(l: &LatticeSpec, snaps: Vec<Snapshot>) -> SnapshotDataset {
        SnapshotDataset::new(l.clone(), 0, snaps, Metadata::ingested("test")).unwrap()
    }

    #[test]
    fn two_by_two_projection() {
        // sites in index order: (0,0), (1,0), (0,1), (1,1)
        let l = LatticeSpec::new(2, &[2, 2]).unwrap();
        let d = dataset(&l, vec![Snapshot::from_spins(&[1, -1, 1, -1])]);
        let mask = SiteMask::new(&l, 1).unwrap();
        assert_eq!(mask.retained(), &[0, 3]);
        let r = apply_rg(&d, &mask).unwrap();
        assert_eq!(r.snapshots()[0].to_spins(), vec![1, -1]);
        assert_eq!(r.n_steps_applied(), 1);
    }

    #[test]
    fn uniform_marginal_is_uniform() {
        let l = LatticeSpec::new(2, &[2, 2]).unwrap();
        let snaps = (0..16u64)
            .map(|x| Snapshot::from_words(4, vec![x]).unwrap())
            .collect();
        let r = apply_rg(&dataset(&l, snaps), &SiteMask::new(&l, 1).unwrap()).unwrap();
        let mut counts: HashMap<Snapshot, usize> = HashMap::new();
        for s in r.snapshots() {
            *counts.entry(s.clone()).or_default() += 1;
        }
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 4));
    }

    #[test]
    fn frame_mismatch() {
        let l = LatticeSpec::new(2, &[4, 4]).unwrap();
        let d = dataset(&l, vec![Snapshot::ones(16)]);
        let err = apply_rg(&d, &SiteMask::new(&l, 2).unwrap()).unwrap_err();
        assert!(matches!(
            err,
            Error::FrameMismatch {
                dataset_steps: 0,
                mask_steps: 2
            }
        ));
        let other = LatticeSpec::new(2, &[4, 8]).unwrap();
        assert!(apply_rg(&d, &SiteMask::new(&other, 1).unwrap()).is_err());
    }

    #[test]
    fn flow_halves_bits() {
        let l = LatticeSpec::new(2, &[256, 256]).unwrap();
        let d = dataset(&l, vec![Snapshot::ones(65536), Snapshot::zeros(65536)]);
        let flow = rg_flow(&d, 4).unwrap();
        let bits: Vec<usize> = flow
            .steps()
            .iter()
            .map(|(d, _)| d.bits_per_snapshot())
            .collect();
        assert_eq!(bits, vec![65536, 32768, 16384, 8192, 4096]);
        assert!(flow.steps().iter().all(|(d, _)| d.len() == 2));
        assert_eq!(rg_flow(&d, 0).unwrap().len(), 1);
        assert!(rg_flow(&d, 10).is_err());
    }

    #[test]
    fn flow_equals_sequential_application() {
        let l = LatticeSpec::new(2, &[8, 8]).unwrap();
        let snaps = (0..5u64)
            .map(|k| Snapshot::from_bits((0..64).map(|i| (i * 7 + k * 3) % 5 < 2)))
            .collect();
        let d = dataset(&l, snaps);
        let flow = rg_flow(&d, 2).unwrap();
        let one = apply_rg(&d, &SiteMask::new(&l, 1).unwrap()).unwrap();
        let two = apply_rg(&one, &SiteMask::new(&l, 2).unwrap()).unwrap();
        assert_eq!(flow.dataset(2).snapshots(), two.snapshots());
    }

    #[test]
    fn retained_bits_are_untouched() {
        let l = LatticeSpec::new(2, &[8, 8]).unwrap();
        let snaps: Vec<Snapshot> = (0..20u64)
            .map(|k| Snapshot::from_bits((0..64u64).map(|i| (i * i + k * 13) % 7 < 3)))
            .collect();
        let d = dataset(&l, snaps.clone());
        for n in 1..=3 {
            let mask = SiteMask::new(&l, n).unwrap();
            let r = rg_flow(&d, n).unwrap();
            let reduced = r.dataset(n);
            for (full, red) in snaps.iter().zip(reduced.snapshots()) {
                for (k, &site) in mask.retained().iter().enumerate() {
                    assert_eq!(full.bit(site), red.bit(k));
                }
            }
        }
    }
}
