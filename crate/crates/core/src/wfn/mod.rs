//! Wave-function networks: unique snapshots are nodes, joined when their
//! Hamming distance falls below the mean nearest-neighbor distance `R`.
//!
//! Only the degree of each node and its nearest-neighbor distance are kept;
//! the adjacency itself is never stored.

mod kernel;

use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{words_for, DedupDataset, Snapshot};
use crate::error::{Error, Result};

pub use kernel::Isa;
use kernel::{CountScan, MinScan, PairScan, Rows, Tile, PIVOTS};

/// Number of positions at which two snapshots differ.
pub fn hamming(a: &Snapshot, b: &Snapshot) -> Result<u32> {
    if a.n_bits() != b.n_bits() {
        return Err(Error::LengthMismatch {
            left: a.n_bits(),
            right: b.n_bits(),
        });
    }
    Ok(kernel::distance(a.words(), b.words()))
}

/// Which pairs count as edges relative to `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffRule {
    /// `D < R`
    #[default]
    Strict,
    /// `D <= R`
    Inclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfnConfig {
    pub cutoff: CutoffRule,
    /// Rows per tile of the pairwise scan.
    pub block_size: usize,
    /// Kernel override, mainly for testing; `None` picks the best available.
    pub isa: Option<Isa>,
}

pub const DEFAULT_BLOCK_SIZE: usize = 256;

impl Default for WfnConfig {
    fn default() -> Self {
        Self {
            cutoff: CutoffRule::Strict,
            block_size: DEFAULT_BLOCK_SIZE,
            isa: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WfnResult {
    /// Nearest-neighbor distance of every node.
    pub r1: Vec<u32>,
    /// Exact `sum(r1)`; `R = r1_sum / n_unique`.
    pub r1_sum: u64,
    pub degrees: Vec<u32>,
    pub cutoff_rule: CutoffRule,
}

impl WfnResult {
    pub fn n_unique(&self) -> usize {
        self.r1.len()
    }

    /// The cutoff `R` as a float.
    pub fn cutoff(&self) -> f64 {
        self.r1_sum as f64 / self.n_unique() as f64
    }

    /// Integer `T` such that a pair is an edge iff `D < T`.
    pub fn edge_threshold(&self) -> u32 {
        edge_threshold(self.r1_sum, self.n_unique(), self.cutoff_rule)
    }

    pub fn edge_count(&self) -> u64 {
        self.degrees.iter().map(|&k| k as u64).sum::<u64>() / 2
    }

    /// Writes `node  r1  degree` rows preceded by `#` summary lines.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# n_unique\t{}", self.n_unique())?;
        writeln!(w, "# r1_sum\t{}", self.r1_sum)?;
        writeln!(w, "# R\t{}", self.cutoff())?;
        writeln!(
            w,
            "# cutoff_rule\t{}",
            match self.cutoff_rule {
                CutoffRule::Strict => "strict",
                CutoffRule::Inclusive => "inclusive",
            }
        )?;
        writeln!(w, "node\tr1\tdegree")?;
        for (i, (r, k)) in self.r1.iter().zip(&self.degrees).enumerate() {
            writeln!(w, "{i}\t{r}\t{k}")?;
        }
        Ok(())
    }
}

/// The node degrees in unique-snapshot order.
pub fn degree_samples(result: &WfnResult) -> Vec<u32> {
    result.degrees.clone()
}

/// Reads the `degree` column of a delimited table (tab, comma or space
/// separated, `#` comments). A single-column file is taken as raw degrees.
pub fn read_degrees<R: BufRead>(reader: R) -> Result<Vec<u32>> {
    let mut column: Option<usize> = None;
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(['\t', ',', ' '])
            .filter(|f| !f.is_empty())
            .collect();
        let col = match column {
            Some(c) => c,
            None => {
                if let Some(c) = fields.iter().position(|f| f.eq_ignore_ascii_case("degree")) {
                    column = Some(c);
                    continue;
                }
                let c = if fields.len() == 1 {
                    0
                } else {
                    fields.len() - 1
                };
                column = Some(c);
                c
            }
        };
        let field = fields.get(col).ok_or_else(|| Error::Parse {
            line: n + 1,
            reason: format!("missing column {}", col + 1),
        })?;
        out.push(field.parse().map_err(|_| Error::Parse {
            line: n + 1,
            reason: format!("not a degree: {field:?}"),
        })?);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("degree file"));
    }
    Ok(out)
}

fn edge_threshold(sum: u64, n: usize, rule: CutoffRule) -> u32 {
    let n = n as u64;
    let t = match rule {
        CutoffRule::Strict => sum.div_ceil(n),
        CutoffRule::Inclusive => sum / n + 1,
    };
    t as u32
}

/// Per-block range of each pivot distance.
struct BlockSpan {
    lo: [u32; PIVOTS],
    hi: [u32; PIVOTS],
}

impl BlockSpan {
    fn of(pivots: &[[u32; PIVOTS]]) -> Self {
        let mut lo = [u32::MAX; PIVOTS];
        let mut hi = [0; PIVOTS];
        for row in pivots {
            for p in 0..PIVOTS {
                lo[p] = lo[p].min(row[p]);
                hi[p] = hi[p].max(row[p]);
            }
        }
        Self { lo, hi }
    }

    /// Lower bound on every distance between the two blocks.
    fn gap(&self, other: &Self) -> u32 {
        (0..PIVOTS)
            .map(|p| {
                other.lo[p]
                    .saturating_sub(self.hi[p])
                    .max(self.lo[p].saturating_sub(other.hi[p]))
            })
            .max()
            .unwrap_or(0)
    }
}

struct Plan {
    tiles: Vec<Tile>,
    /// Lower bound on all distances within each tile.
    gaps: Vec<u32>,
}

/// Upper-triangle tiles, nearest-to-diagonal first so that pass 1 finds
/// small minima early.
fn plan(n: usize, block: usize, pivots: &[[u32; PIVOTS]]) -> Plan {
    let starts: Vec<usize> = (0..n).step_by(block).collect();
    let spans: Vec<BlockSpan> = starts
        .iter()
        .map(|&a| BlockSpan::of(&pivots[a..(a + block).min(n)]))
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(starts.len() * (starts.len() + 1) / 2);
    for ia in 0..starts.len() {
        for ib in ia..starts.len() {
            pairs.push((ia, ib));
        }
    }
    pairs.sort_by_key(|&(ia, ib)| (ib - ia, ia));
    let tiles = pairs
        .iter()
        .map(|&(ia, ib)| Tile {
            a: starts[ia]..(starts[ia] + block).min(n),
            b: starts[ib]..(starts[ib] + block).min(n),
        })
        .collect();
    let gaps = pairs
        .iter()
        .map(|&(ia, ib)| spans[ia].gap(&spans[ib]))
        .collect();
    Plan { tiles, gaps }
}

fn run_pass<S, F, K>(
    rows: &Rows,
    plan: &Plan,
    isa: Isa,
    shared: &[AtomicU32],
    skip: K,
    make: F,
    merge: fn(&AtomicU32, u32),
) where
    S: PairScan + Into<Vec<u32>>,
    F: Fn(&Tile) -> S + Sync,
    K: Fn(&Tile, u32) -> bool + Sync,
{
    plan.tiles
        .par_iter()
        .zip(&plan.gaps)
        .for_each(|(tile, &gap)| {
            if skip(tile, gap) {
                return;
            }
            let mut scan = make(tile);
            kernel::scan_tile(isa, rows, tile, &mut scan);
            for (local, v) in scan.into().into_iter().enumerate() {
                merge(&shared[tile.global(local)], v);
            }
        });
}

impl From<MinScan> for Vec<u32> {
    fn from(s: MinScan) -> Self {
        s.local
    }
}

impl From<CountScan> for Vec<u32> {
    fn from(s: CountScan) -> Self {
        s.local
    }
}

/// Builds the network over the unique snapshots with default settings.
pub fn build_wfn(unique: &DedupDataset) -> Result<WfnResult> {
    build_wfn_with(unique, &WfnConfig::default())
}

pub fn build_wfn_with(unique: &DedupDataset, config: &WfnConfig) -> Result<WfnResult> {
    build_from_snapshots(unique.unique(), config)
}

/// Network over `snapshots`, which must be pairwise distinct.
pub fn build_from_snapshots(snapshots: &[Snapshot], config: &WfnConfig) -> Result<WfnResult> {
    let n = snapshots.len();
    if n < 2 {
        return Err(Error::TooFewSnapshots {
            needed: 2,
            found: n,
        });
    }
    if config.block_size == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let bits = snapshots[0].n_bits();
    if let Some(s) = snapshots.iter().find(|s| s.n_bits() != bits) {
        return Err(Error::LengthMismatch {
            left: bits,
            right: s.n_bits(),
        });
    }
    let words = words_for(bits);

    // Pivot 0 is the all-down snapshot, so its distance is the popcount;
    // rows are processed sorted by it.
    let mut refs: Vec<&Snapshot> = Vec::with_capacity(PIVOTS);
    let zeros = Snapshot::zeros(bits);
    refs.push(&zeros);
    refs.extend((1..PIVOTS).map(|k| &snapshots[k * n / PIVOTS]));
    let pivot_of = |s: &Snapshot| -> [u32; PIVOTS] {
        std::array::from_fn(|p| kernel::distance(s.words(), refs[p].words()))
    };
    let unsorted: Vec<[u32; PIVOTS]> = snapshots.par_iter().map(pivot_of).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (unsorted[i][0], i));
    let pivots: Vec<[u32; PIVOTS]> = order.iter().map(|&i| unsorted[i]).collect();
    let mut data = Vec::with_capacity(n * words);
    for &i in &order {
        data.extend_from_slice(snapshots[i].words());
    }
    let rows = Rows {
        data: &data,
        words,
        pivots: &pivots,
    };
    let isa = config.isa.unwrap_or_else(kernel::detect_isa);
    let plan = plan(n, config.block_size, &pivots);

    let minima: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(u32::MAX)).collect();
    let current = |i: usize| minima[i].load(Ordering::Relaxed);
    run_pass(
        &rows,
        &plan,
        isa,
        &minima,
        // minima only decrease, so a stale read is still a valid bound
        |t, gap| t.a.clone().chain(t.b.clone()).all(|i| current(i) <= gap),
        |t| MinScan {
            local: (0..t.local_len()).map(|l| current(t.global(l))).collect(),
        },
        |a, v| {
            a.fetch_min(v, Ordering::Relaxed);
        },
    );
    let sorted_r1: Vec<u32> = minima.into_iter().map(AtomicU32::into_inner).collect();
    if let Some(pos) = sorted_r1.iter().position(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!(
            "snapshot {} is duplicated; deduplicate first",
            order[pos]
        )));
    }
    let r1_sum: u64 = sorted_r1.iter().map(|&d| d as u64).sum();
    let threshold = edge_threshold(r1_sum, n, config.cutoff);

    let counts: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(0)).collect();
    run_pass(
        &rows,
        &plan,
        isa,
        &counts,
        |_, gap| gap >= threshold,
        |t| CountScan {
            threshold,
            local: vec![0; t.local_len()],
        },
        |a, v| {
            if v > 0 {
                a.fetch_add(v, Ordering::Relaxed);
            }
        },
    );
    let mut r1 = vec![0; n];
    let mut degrees = vec![0; n];
    for (pos, (&i, count)) in order.iter().zip(counts).enumerate() {
        r1[i] = sorted_r1[pos];
        degrees[i] = count.into_inner();
    }
    Ok(WfnResult {
        r1,
        r1_sum,
        degrees,
        cutoff_rule: config.cutoff,
    })
}

/// Kernels usable on this machine, for benchmarks and cross-checks.
pub fn available_isas() -> Vec<Isa> {
    kernel::available_isas()
}
