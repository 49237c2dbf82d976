use std::collections::HashMap;

use super::{Snapshot, SnapshotDataset};

/// Unique snapshots in first-occurrence order, with how often each occurred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupDataset {
    unique: Vec<Snapshot>,
    multiplicities: Vec<usize>,
}

impl DedupDataset {
    pub fn from_snapshots<'a, I: IntoIterator<Item = &'a Snapshot>>(snapshots: I) -> Self {
        let mut index: HashMap<&'a Snapshot, usize> = HashMap::new();
        let mut order: Vec<&'a Snapshot> = Vec::new();
        let mut multiplicities = Vec::new();
        for s in snapshots {
            match index.get(s) {
                Some(&k) => multiplicities[k] += 1,
                None => {
                    index.insert(s, order.len());
                    order.push(s);
                    multiplicities.push(1);
                }
            }
        }
        Self {
            unique: order.into_iter().cloned().collect(),
            multiplicities,
        }
    }

    pub fn unique(&self) -> &[Snapshot] {
        &self.unique
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.unique.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unique.is_empty()
    }

    /// Size of the dataset before deduplication.
    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

pub fn deduplicate(dataset: &SnapshotDataset) -> DedupDataset {
    DedupDataset::from_snapshots(dataset.snapshots())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn snap(bits: &[bool]) -> Snapshot {
        Snapshot::from_bits(bits.iter().copied())
    }

    #[test]
    fn counts_repeats_in_order() {
        let a = snap(&[true, false, true]);
        let b = snap(&[false, false, true]);
        let d = DedupDataset::from_snapshots(&[a.clone(), b.clone(), a.clone()]);
        assert_eq!(d.unique(), &[a, b]);
        assert_eq!(d.multiplicities(), &[2, 1]);
    }

    #[test]
    fn distinct_input_is_identity() {
        let v: Vec<Snapshot> = (0..8u8)
            .map(|x| snap(&[x & 1 != 0, x & 2 != 0, x & 4 != 0]))
            .collect();
        let d = DedupDataset::from_snapshots(&v);
        assert_eq!(d.unique(), v.as_slice());
        assert!(d.multiplicities().iter().all(|&m| m == 1));
    }

    fn pairwise(v: &[Snapshot]) -> (Vec<Snapshot>, Vec<usize>) {
        let mut uniq: Vec<Snapshot> = Vec::new();
        let mut mult = Vec::new();
        for s in v {
            match uniq.iter().position(|u| u == s) {
                Some(k) => mult[k] += 1,
                None => {
                    uniq.push(s.clone());
                    mult.push(1);
                }
            }
        }
        (uniq, mult)
    }

    proptest! {
        #[test]
        fn hash_dedup_matches_pairwise(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 0..60)) {
            let v: Vec<Snapshot> = rows.into_iter().map(Snapshot::from_bits).collect();
            let d = DedupDataset::from_snapshots(&v);
            let (u, m) = pairwise(&v);
            prop_assert_eq!(d.unique(), u.as_slice());
            prop_assert_eq!(d.multiplicities(), m.as_slice());
            prop_assert_eq!(d.total(), v.len());
        }
    }
}
