//! XOR-popcount distance kernels and the blocked pairwise scan.
//!
//! The tile loop is compiled several times with different target features
//! and picked at runtime, so the popcount inlines into the innermost loop
//! (AVX-512 `vpopcntq` where available).

use std::ops::Range;
use std::sync::OnceLock;

/// Words summed between two early-exit checks.
const CHUNK: usize = 8;

#[inline(always)]
fn xor_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Exact distance if it is below `bound`, otherwise some partial count
/// `>= bound` (and never above the true distance).
#[inline(always)]
fn bounded_distance(a: &[u64], b: &[u64], bound: u32) -> u32 {
    let mut acc = 0u32;
    let mut ca = a.chunks_exact(CHUNK);
    let mut cb = b.chunks_exact(CHUNK);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc += xor_popcount(x, y);
        if acc >= bound {
            return acc;
        }
    }
    acc + xor_popcount(ca.remainder(), cb.remainder())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Isa {
    Generic,
    #[cfg(target_arch = "x86_64")]
    Popcnt,
    #[cfg(target_arch = "x86_64")]
    Avx512,
}

pub fn detect_isa() -> Isa {
    static ISA: OnceLock<Isa> = OnceLock::new();
    *ISA.get_or_init(|| {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx512f")
                && std::arch::is_x86_feature_detected!("avx512vpopcntdq")
            {
                return Isa::Avx512;
            }
            if std::arch::is_x86_feature_detected!("popcnt") {
                return Isa::Popcnt;
            }
        }
        Isa::Generic
    })
}

/// Reference points for triangle-inequality lower bounds.
pub const PIVOTS: usize = 4;

/// Row-major packed snapshots, `words` u64 per row, with each row's
/// distances to the [`PIVOTS`] reference snapshots.
pub struct Rows<'a> {
    pub data: &'a [u64],
    pub words: usize,
    pub pivots: &'a [[u32; PIVOTS]],
}

impl Rows<'_> {
    #[inline(always)]
    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    /// `max_p |D(i, p) - D(j, p)| <= D(i, j)`.
    #[inline(always)]
    fn lower_bound(&self, i: usize, j: usize) -> u32 {
        let (a, b) = (&self.pivots[i], &self.pivots[j]);
        let mut lb = 0;
        for p in 0..PIVOTS {
            lb = lb.max(a[p].abs_diff(b[p]));
        }
        lb
    }
}

/// Per-pair bookkeeping for one tile. Indices are tile-local.
pub trait PairScan {
    fn bound(&self, a: usize, b: usize) -> u32;
    fn record(&mut self, a: usize, b: usize, distance: u32);
}

/// Running nearest-neighbor distances.
pub struct MinScan {
    pub local: Vec<u32>,
}

impl PairScan for MinScan {
    #[inline(always)]
    fn bound(&self, a: usize, b: usize) -> u32 {
        self.local[a].max(self.local[b])
    }

    #[inline(always)]
    fn record(&mut self, a: usize, b: usize, d: u32) {
        if d < self.local[a] {
            self.local[a] = d;
        }
        if d < self.local[b] {
            self.local[b] = d;
        }
    }
}

/// Counts pairs strictly closer than `threshold`.
pub struct CountScan {
    pub threshold: u32,
    pub local: Vec<u32>,
}

impl PairScan for CountScan {
    #[inline(always)]
    fn bound(&self, _: usize, _: usize) -> u32 {
        self.threshold
    }

    #[inline(always)]
    fn record(&mut self, a: usize, b: usize, d: u32) {
        if d < self.threshold {
            self.local[a] += 1;
            self.local[b] += 1;
        }
    }
}

/// A tile of the upper triangle: rows `a` against rows `b`. When the ranges
/// coincide only pairs `i < j` are visited. Local index of row `i` in `a` is
/// `i - a.start`; of row `j` in `b` it is `b_offset + j - b.start` (or the
/// `a` index when the ranges coincide).
pub struct Tile {
    pub a: Range<usize>,
    pub b: Range<usize>,
}

impl Tile {
    pub fn same(&self) -> bool {
        self.a == self.b
    }

    pub fn local_len(&self) -> usize {
        if self.same() {
            self.a.len()
        } else {
            self.a.len() + self.b.len()
        }
    }

    /// Global row of a local index.
    pub fn global(&self, local: usize) -> usize {
        if local < self.a.len() {
            self.a.start + local
        } else {
            self.b.start + local - self.a.len()
        }
    }
}

#[inline(always)]
fn scan_tile_body<S: PairScan>(rows: &Rows, tile: &Tile, scan: &mut S) {
    let same = tile.same();
    let b_offset = tile.a.len();
    for i in tile.a.clone() {
        let ra = rows.row(i);
        let li = i - tile.a.start;
        let first = if same { i + 1 } else { tile.b.start };
        for j in first..tile.b.end {
            let lj = if same {
                j - tile.a.start
            } else {
                b_offset + j - tile.b.start
            };
            let bound = scan.bound(li, lj);
            if rows.lower_bound(i, j) >= bound {
                continue;
            }
            let d = bounded_distance(ra, rows.row(j), bound);
            scan.record(li, lj, d);
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx512vpopcntdq,popcnt")]
unsafe fn scan_tile_avx512<S: PairScan>(rows: &Rows, tile: &Tile, scan: &mut S) {
    scan_tile_body(rows, tile, scan)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn scan_tile_popcnt<S: PairScan>(rows: &Rows, tile: &Tile, scan: &mut S) {
    scan_tile_body(rows, tile, scan)
}

pub fn scan_tile<S: PairScan>(isa: Isa, rows: &Rows, tile: &Tile, scan: &mut S) {
    match isa {
        // SAFETY: `detect_isa` only reports features the CPU supports.
        #[cfg(target_arch = "x86_64")]
        Isa::Avx512 => unsafe { scan_tile_avx512(rows, tile, scan) },
        #[cfg(target_arch = "x86_64")]
        Isa::Popcnt => unsafe { scan_tile_popcnt(rows, tile, scan) },
        Isa::Generic => scan_tile_body(rows, tile, scan),
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx512vpopcntdq,popcnt")]
unsafe fn distance_avx512(a: &[u64], b: &[u64]) -> u32 {
    xor_popcount(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn distance_popcnt(a: &[u64], b: &[u64]) -> u32 {
    xor_popcount(a, b)
}

/// Hamming distance of two equally long word slices.
pub fn distance(a: &[u64], b: &[u64]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    match detect_isa() {
        // SAFETY: `detect_isa` only reports features the CPU supports.
        #[cfg(target_arch = "x86_64")]
        Isa::Avx512 => unsafe { distance_avx512(a, b) },
        #[cfg(target_arch = "x86_64")]
        Isa::Popcnt => unsafe { distance_popcnt(a, b) },
        Isa::Generic => xor_popcount(a, b),
    }
}

/// All instruction-set variants usable on this machine.
pub fn available_isas() -> Vec<Isa> {
    let mut v = vec![Isa::Generic];
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("popcnt") {
            v.push(Isa::Popcnt);
        }
        if detect_isa() == Isa::Avx512 {
            v.push(Isa::Avx512);
        }
    }
    v
}
