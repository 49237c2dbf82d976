//! `SNAPRG01` dataset files.
//!
//! ```text
//! offset  size            content
//! 0       8               magic "SNAPRG01"
//! 8       4               header length H (u32, little-endian)
//! 12      H               UTF-8 JSON header
//! 12+H    N_r * W * 8     snapshot records, W = ceil(N / 64) u64 words each,
//!                         little-endian, site i at bit (i mod 64) of word i/64
//! ```
//!
//! Header fields: `dimension`, `lengths`, `n_steps_applied`,
//! `bits_per_snapshot` (N), `n_snapshots` (N_r) and `metadata`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{words_for, Metadata, Snapshot, SnapshotDataset};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, SiteMask};

pub const MAGIC: &[u8; 8] = b"SNAPRG01";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dimension: usize,
    lengths: Vec<usize>,
    n_steps_applied: usize,
    bits_per_snapshot: usize,
    n_snapshots: usize,
    metadata: Metadata,
}

pub fn write_dataset(dataset: &SnapshotDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut out = BufWriter::new(file);
    write_to(dataset, &mut out)?;
    out.flush()?;
    Ok(())
}

pub(crate) fn write_to<W: Write>(dataset: &SnapshotDataset, out: &mut W) -> Result<()> {
    let header = Header {
        dimension: dataset.lattice().dimension(),
        lengths: dataset.lattice().lengths().to_vec(),
        n_steps_applied: dataset.n_steps_applied(),
        bits_per_snapshot: dataset.bits_per_snapshot(),
        n_snapshots: dataset.len(),
        metadata: dataset.metadata.clone(),
    };
    let header = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
    let header_len =
        u32::try_from(header.len()).map_err(|_| Error::Format("header too large".into()))?;
    out.write_all(MAGIC)?;
    out.write_all(&header_len.to_le_bytes())?;
    out.write_all(&header)?;
    for snapshot in dataset.snapshots() {
        for word in snapshot.words() {
            out.write_all(&word.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<SnapshotDataset> {
    let file = File::open(path)?;
    read_from(&mut BufReader::new(file))
}

pub(crate) fn read_from<R: Read>(input: &mut R) -> Result<SnapshotDataset> {
    let mut magic = [0u8; 8];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Format("file too short for magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            std::str::from_utf8(MAGIC).expect("ascii")
        )));
    }
    let mut len = [0u8; 4];
    input
        .read_exact(&mut len)
        .map_err(|_| Error::Format("file too short for header length".into()))?;
    let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
    input
        .read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    let header: Header =
        serde_json::from_slice(&header).map_err(|e| Error::Format(format!("header: {e}")))?;

    if header.n_snapshots == 0 {
        return Err(Error::Format("header declares zero snapshots".into()));
    }
    let lattice = LatticeSpec::new(header.dimension, &header.lengths)?;
    let expected_bits = SiteMask::new(&lattice, header.n_steps_applied)?.len();
    if header.bits_per_snapshot != expected_bits {
        return Err(Error::Format(format!(
            "header says {} bits per snapshot but lattice {:?} after {} steps has {expected_bits} sites",
            header.bits_per_snapshot, header.lengths, header.n_steps_applied
        )));
    }

    let n_words = words_for(expected_bits);
    let record_bytes = n_words * 8;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    let expected_bytes = header.n_snapshots * record_bytes;
    if body.len() < expected_bytes {
        return Err(Error::Truncated {
            expected: header.n_snapshots,
            found: body.len() / record_bytes,
        });
    }
    if body.len() > expected_bytes {
        return Err(Error::Format(format!(
            "{} trailing bytes after {} records",
            body.len() - expected_bytes,
            header.n_snapshots
        )));
    }

    let snapshots = body
        .chunks_exact(record_bytes)
        .enumerate()
        .map(|(k, record)| {
            let words = record
                .chunks_exact(8)
                .map(|b| u64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect();
            Snapshot::from_words(expected_bits, words)
                .map_err(|e| Error::Format(format!("record {k}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    SnapshotDataset::new(lattice, header.n_steps_applied, snapshots, header.metadata)
}
