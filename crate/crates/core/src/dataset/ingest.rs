//! Plain-text snapshot ingestion: one configuration per line, whitespace
//! separated tokens in row-major site order (x fastest). Blank lines and
//! lines starting with `#` are skipped.

use std::fs;
use std::path::Path;

use super::{Metadata, Snapshot, SnapshotDataset};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolMapping {
    /// `+1`/`1` is spin up, `-1` is spin down.
    PlusMinus,
    /// `1` is spin up, `0` is spin down.
    ZeroOne,
}

impl SymbolMapping {
    fn parse(self, token: &str) -> Option<bool> {
        match self {
            SymbolMapping::PlusMinus => match token {
                "+1" | "1" => Some(true),
                "-1" | "\u{2212}1" => Some(false),
                _ => None,
            },
            SymbolMapping::ZeroOne => match token {
                "1" => Some(true),
                "0" => Some(false),
                _ => None,
            },
        }
    }
}

impl std::str::FromStr for SymbolMapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" | "plus-minus" | "+-1" => Ok(SymbolMapping::PlusMinus),
            "01" | "zero-one" => Ok(SymbolMapping::ZeroOne),
            other => Err(Error::InvalidArgument(format!(
                "unknown symbol mapping {other:?} (use \"pm\" or \"01\")"
            ))),
        }
    }
}

pub fn ingest_text(
    path: impl AsRef<Path>,
    lattice: &LatticeSpec,
    mapping: SymbolMapping,
) -> Result<SnapshotDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let snapshots = parse_text(&text, lattice.num_sites(), mapping)?;
    let tag = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    SnapshotDataset::new(lattice.clone(), 0, snapshots, Metadata::ingested(tag))
}

pub fn parse_text(text: &str, n_sites: usize, mapping: SymbolMapping) -> Result<Vec<Snapshot>> {
    let mut snapshots = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut bits = Vec::with_capacity(n_sites);
        for token in line.split_whitespace() {
            let bit = mapping.parse(token).ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("unknown token {token:?}"),
            })?;
            bits.push(bit);
        }
        if bits.len() != n_sites {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected {n_sites} tokens, found {}", bits.len()),
            });
        }
        snapshots.push(Snapshot::from_bits(bits));
    }
    if snapshots.is_empty() {
        return Err(Error::EmptyInput("no configurations in text input"));
    }
    Ok(snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_minus_line() {
        let line = "+1 +1 \u{2212}1 -1 1 1 1 1 1 1 1 1 1 1 1 1";
        let s = parse_text(line, 16, SymbolMapping::PlusMinus).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(&s[0].to_spins()[..4], &[1, 1, -1, -1]);
    }

    #[test]
    fn wrong_token_count_names_line() {
        let text = format!("# header\n{}\n{}\n", "1 ".repeat(16), "1 ".repeat(15));
        match parse_text(&text, 16, SymbolMapping::ZeroOne) {
            Err(Error::Parse { line, reason }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("15"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_maps_to_down() {
        let s = parse_text("0 1 0 1", 4, SymbolMapping::ZeroOne).unwrap();
        assert_eq!(s[0].to_spins(), vec![-1, 1, -1, 1]);
        assert!(parse_text("0 1 -1 1", 4, SymbolMapping::ZeroOne).is_err());
        assert!(parse_text("0 1 0 1", 4, SymbolMapping::PlusMinus).is_err());
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse_text("\n# nothing\n", 4, SymbolMapping::ZeroOne),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn file_ingest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tfim.txt");
        fs::write(&path, "1 -1 1 -1\n-1 -1 -1 -1\n").unwrap();
        let lattice = LatticeSpec::new(2, &[2, 2]).unwrap();
        let d = ingest_text(&path, &lattice, SymbolMapping::PlusMinus).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.metadata.source_tag.as_deref(), Some("tfim.txt"));
        assert_eq!(d.metadata.source, super::super::Source::Ingested);
    }
}
