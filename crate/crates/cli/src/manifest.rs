//! Run manifest: every output file of a pipeline run with its SHA-256, grouped
//! by stage, plus the headline numbers of each stage.

use std::fs::{self, File};
use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub outputs: Vec<FileEntry>,
    #[serde(default)]
    pub summary: serde_json::Value,
}

impl StageRecord {
    /// Hashes `files` (relative to `dir`) into a record.
    pub fn new(
        name: impl Into<String>,
        dir: &Path,
        files: &[PathBuf],
        summary: serde_json::Value,
    ) -> io::Result<Self> {
        let outputs = files
            .iter()
            .map(|f| {
                Ok(FileEntry {
                    path: f.clone(),
                    sha256: sha256_file(&dir.join(f))?,
                })
            })
            .collect::<io::Result<_>>()?;
        Ok(Self {
            name: name.into(),
            outputs,
            summary,
        })
    }

    /// True when every listed output still exists with the recorded checksum.
    pub fn is_intact(&self, dir: &Path) -> bool {
        self.outputs
            .iter()
            .all(|f| sha256_file(&dir.join(&f.path)).is_ok_and(|h| h == f.sha256))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    /// SHA-256 of the canonical JSON form of the run configuration.
    pub config_sha256: String,
    pub stages: Vec<StageRecord>,
}

impl Manifest {
    pub fn new(config_sha256: String) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256,
            stages: Vec::new(),
        }
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Replaces any record with the same name.
    pub fn record(&mut self, stage: StageRecord) {
        self.stages.retain(|s| s.name != stage.name);
        self.stages.push(stage);
    }

    /// All `(path, sha256)` pairs in stage order.
    pub fn checksums(&self) -> Vec<(PathBuf, String)> {
        self.stages
            .iter()
            .flat_map(|s| s.outputs.iter().map(|f| (f.path.clone(), f.sha256.clone())))
            .collect()
    }

    pub fn load(dir: &Path) -> io::Result<Option<Self>> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(io::Error::other)
    }

    /// Writes through a temporary file so a crash never leaves a torn manifest.
    pub fn save(&self, dir: &Path) -> io::Result<()> {
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(&tmp, text + "\n")?;
        fs::rename(tmp, dir.join(MANIFEST_FILE))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_bytes(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn round_trip_and_integrity() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), b"abc").unwrap();
        let rec = StageRecord::new(
            "s",
            dir.path(),
            &[PathBuf::from("a.txt")],
            serde_json::json!({"x": 1}),
        )
        .unwrap();
        assert_eq!(rec.outputs[0].sha256, sha256_bytes(b"abc"));
        let mut m = Manifest::new("cfg".into());
        m.record(rec.clone());
        m.record(rec);
        assert_eq!(m.stages.len(), 1);
        m.save(dir.path()).unwrap();
        let back = Manifest::load(dir.path()).unwrap().unwrap();
        assert_eq!(back, m);
        assert!(back.stages[0].is_intact(dir.path()));
        fs::write(dir.path().join("a.txt"), b"abd").unwrap();
        assert!(!back.stages[0].is_intact(dir.path()));
    }
}
