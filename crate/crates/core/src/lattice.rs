//! Hypercubic lattices with periodic boundaries, neighbor tables and the
//! parity decimation masks used by the snapshot RG.
//!
//! Sites are indexed row-major with the x axis fastest:
//! `index = x + Lx * (y + Ly * z)`.

use crate::error::{Error, Result};

/// Smallest admissible side length. Two is the smallest even length; on a
/// periodic 2-site ring both forward bonds join the same pair of sites.
pub const MIN_SIDE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    lengths: Vec<usize>,
    strides: Vec<usize>,
}

impl LatticeSpec {
    pub fn new(dimension: usize, lengths: &[usize]) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        if lengths.len() != dimension {
            return Err(Error::InvalidLattice(format!(
                "expected {dimension} side lengths, got {}",
                lengths.len()
            )));
        }
        for (axis, &len) in lengths.iter().enumerate() {
            if len < MIN_SIDE || len % 2 != 0 {
                return Err(Error::InvalidLattice(format!(
                    "side length along axis {axis} must be even and >= {MIN_SIDE}, got {len}"
                )));
            }
        }
        let mut strides = Vec::with_capacity(dimension);
        let mut stride = 1usize;
        for &len in lengths {
            strides.push(stride);
            stride = stride
                .checked_mul(len)
                .ok_or_else(|| Error::InvalidLattice("site count overflows".into()))?;
        }
        Ok(Self {
            lengths: lengths.to_vec(),
            strides,
        })
    }

    /// Square (2D) or cubic (3D) lattice of side `side`.
    pub fn hypercubic(dimension: usize, side: usize) -> Result<Self> {
        Self::new(dimension, &vec![side; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn num_sites(&self) -> usize {
        self.lengths.iter().product()
    }

    /// Linear index of in-range coordinates.
    pub fn index_of(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dimension());
        coords
            .iter()
            .zip(&self.lengths)
            .zip(&self.strides)
            .map(|((&c, &len), &stride)| {
                debug_assert!(c < len);
                c * stride
            })
            .sum()
    }

    /// Linear index of arbitrary integer coordinates, wrapped periodically.
    pub fn wrapped_index(&self, coords: &[i64]) -> usize {
        debug_assert_eq!(coords.len(), self.dimension());
        coords
            .iter()
            .zip(&self.lengths)
            .zip(&self.strides)
            .map(|((&c, &len), &stride)| c.rem_euclid(len as i64) as usize * stride)
            .sum()
    }

    pub fn coords_of(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.num_sites());
        self.lengths
            .iter()
            .zip(&self.strides)
            .map(|(&len, &stride)| (index / stride) % len)
            .collect()
    }
}

/// Forward neighbors of every site. Each bond appears exactly once, attached
/// to the site it leaves in the positive direction.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    order: u8,
    per_site: usize,
    forward: Vec<usize>,
}

impl NeighborTable {
    /// `order` 1 gives nearest neighbors along each axis, `order` 2 the two
    /// forward diagonals `(+1,+1)` and `(+1,-1)` of a square lattice.
    pub fn new(lattice: &LatticeSpec, order: u8) -> Result<Self> {
        let d = lattice.dimension();
        let offsets: Vec<Vec<i64>> = match (order, d) {
            (1, _) => (0..d)
                .map(|axis| (0..d).map(|a| i64::from(a == axis)).collect())
                .collect(),
            (2, 2) => vec![vec![1, 1], vec![1, -1]],
            (2, _) => {
                return Err(Error::Unsupported(
                    "next-nearest-neighbor tables are only defined in 2D".into(),
                ))
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "neighbor order must be 1 or 2, got {order}"
                )))
            }
        };
        let n = lattice.num_sites();
        let mut forward = Vec::with_capacity(n * offsets.len());
        let mut shifted = vec![0i64; d];
        for site in 0..n {
            let coords = lattice.coords_of(site);
            for off in &offsets {
                for a in 0..d {
                    shifted[a] = coords[a] as i64 + off[a];
                }
                forward.push(lattice.wrapped_index(&shifted));
            }
        }
        Ok(Self {
            order,
            per_site: offsets.len(),
            forward,
        })
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn per_site(&self) -> usize {
        self.per_site
    }

    pub fn num_sites(&self) -> usize {
        self.forward.len() / self.per_site
    }

    pub fn forward(&self, site: usize) -> &[usize] {
        &self.forward[site * self.per_site..(site + 1) * self.per_site]
    }

    pub fn bond_count(&self) -> usize {
        self.forward.len()
    }

    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward
            .iter()
            .enumerate()
            .map(|(k, &j)| (k / self.per_site, j))
    }

    /// Flattened full adjacency: `2 * per_site` entries per site. A pair
    /// joined by two distinct bonds (possible on side-2 lattices) appears
    /// twice.
    pub fn full_adjacency(&self) -> Vec<usize> {
        let n = self.num_sites();
        let z = 2 * self.per_site;
        let mut adj = vec![Vec::with_capacity(z); n];
        for (i, j) in self.bonds() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj.into_iter().flatten().collect()
    }
}

/// Primitive vectors of a (sub)lattice in original-lattice coordinates,
/// one row per vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    vectors: Vec<Vec<i64>>,
}

impl Frame {
    fn identity(d: usize) -> Self {
        Self {
            vectors: (0..d)
                .map(|k| (0..d).map(|a| i64::from(a == k)).collect())
                .collect(),
        }
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    /// Basis of the index-2 sublattice `{ sum_k u_k b_k : sum_k u_k even }`.
    fn decimated(&self) -> Self {
        let b = &self.vectors;
        let add = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<_>>();
        let sub = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>();
        let vectors = match b.len() {
            2 => vec![add(&b[0], &b[1]), sub(&b[0], &b[1])],
            3 => vec![add(&b[0], &b[1]), sub(&b[0], &b[1]), add(&b[1], &b[2])],
            _ => unreachable!("lattices are 2D or 3D"),
        };
        Self { vectors }
    }

    /// Matrix whose columns are the primitive vectors.
    fn column_matrix(&self) -> [[i64; 3]; 3] {
        let mut m = [[0i64; 3]; 3];
        for (k, v) in self.vectors.iter().enumerate() {
            for (a, &x) in v.iter().enumerate() {
                m[a][k] = x;
            }
        }
        if self.dimension() == 2 {
            m[2][2] = 1;
        }
        m
    }

    /// Integer coordinates `u` with `point = sum_k u_k b_k`, if they exist.
    pub fn solve(&self, point: &[i64]) -> Option<Vec<i64>> {
        let d = self.dimension();
        let m = self.column_matrix();
        let det = det3(&m);
        debug_assert!(det != 0);
        let adj = adjugate3(&m);
        let mut x = [0i64; 3];
        x[..d].copy_from_slice(point);
        let mut u = Vec::with_capacity(d);
        for row in adj.iter().take(d) {
            let num: i64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            if num % det != 0 {
                return None;
            }
            u.push(num / det);
        }
        Some(u)
    }

    /// Lattice scale factor per step, `2^(1/d)`, raised to `steps`.
    pub fn scale_factor(dimension: usize, steps: usize) -> f64 {
        2f64.powf(steps as f64 / dimension as f64)
    }
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn adjugate3(m: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut adj = [[0i64; 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            // cofactor of m[j][i]
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]]
                - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
            *entry = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

/// Sites retained after `n_steps` composed decimation steps.
///
/// Each step keeps the sites whose coordinates in the current frame have an
/// even sum. In 2D this alternates between the checkerboard `(x+y)` even,
/// rotated by 45°, and the axis-aligned sublattice `x, y` even at twice the
/// spacing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteMask {
    lattice: LatticeSpec,
    n_steps: usize,
    retained: Vec<usize>,
    frame: Frame,
}

impl SiteMask {
    pub fn new(lattice: &LatticeSpec, n_steps: usize) -> Result<Self> {
        let max = Self::max_steps(lattice);
        if n_steps > max {
            return Err(Error::TooManySteps {
                requested: n_steps,
                max,
                lengths: lattice.lengths().to_vec(),
            });
        }
        let mut frame = Frame::identity(lattice.dimension());
        let mut retained: Vec<usize> = (0..lattice.num_sites()).collect();
        for _ in 0..n_steps {
            frame = frame.decimated();
            retained.retain(|&site| {
                let coords: Vec<i64> = lattice.coords_of(site).iter().map(|&c| c as i64).collect();
                frame.solve(&coords).is_some()
            });
        }
        debug_assert_eq!(retained.len(), lattice.num_sites() >> n_steps);
        Ok(Self {
            lattice: lattice.clone(),
            n_steps,
            retained,
            frame,
        })
    }

    /// Largest step count for which every step halves the site count and the
    /// retained sublattice stays compatible with the periodic boundaries.
    /// In 2D this is further capped at `floor(log2(min L)) + 1`.
    pub fn max_steps(lattice: &LatticeSpec) -> usize {
        let d = lattice.dimension();
        let n = lattice.num_sites();
        let mut frame = Frame::identity(d);
        let mut steps = 0usize;
        loop {
            let next = frame.decimated();
            let periodic = (0..d).all(|a| {
                let mut period = vec![0i64; d];
                period[a] = lattice.lengths()[a] as i64;
                next.solve(&period).is_some()
            });
            if !periodic || n % (1usize << (steps + 1)) != 0 {
                break;
            }
            frame = next;
            steps += 1;
        }
        if d == 2 {
            let min_side = *lattice.lengths().iter().min().expect("nonempty");
            steps = steps.min(min_side.ilog2() as usize + 1);
        }
        steps
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Retained linear indices, strictly increasing.
    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Position of an original site within the retained list.
    pub fn position_of(&self, site: usize) -> Option<usize> {
        self.retained.binary_search(&site).ok()
    }

    /// Each retained site with its coordinates in units of the current
    /// primitive vectors.
    pub fn retained_coordinates(&self) -> Vec<(usize, Vec<i64>)> {
        self.retained
            .iter()
            .map(|&site| {
                let coords: Vec<i64> = self
                    .lattice
                    .coords_of(site)
                    .iter()
                    .map(|&c| c as i64)
                    .collect();
                let u = self
                    .frame
                    .solve(&coords)
                    .expect("retained sites lie on the frame lattice");
                (site, u)
            })
            .collect()
    }

    /// Positions in this mask's retained list that survive one further step.
    pub fn step_positions(&self, next: &SiteMask) -> Result<Vec<usize>> {
        if next.lattice != self.lattice || next.n_steps != self.n_steps + 1 {
            return Err(Error::FrameMismatch {
                dataset_steps: self.n_steps,
                mask_steps: next.n_steps,
            });
        }
        Ok(next
            .retained
            .iter()
            .map(|&site| self.position_of(site).expect("decimation masks are nested"))
            .collect())
    }

    /// Number of lattice steps along `direction` (in original coordinates)
    /// before the periodic boundaries bring a site back onto itself.
    pub fn period_along(&self, direction: &[i64]) -> usize {
        let mut period = 1usize;
        for (&len, &e) in self.lattice.lengths().iter().zip(direction) {
            if e != 0 {
                let step = len / gcd(len, e.unsigned_abs() as usize);
                period = period / gcd(period, step) * step;
            }
        }
        period
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn square(l: usize) -> LatticeSpec {
        LatticeSpec::new(2, &[l, l]).unwrap()
    }

    #[test]
    fn site_counts() {
        assert_eq!(square(4).num_sites(), 16);
        assert_eq!(LatticeSpec::new(3, &[4, 4, 4]).unwrap().num_sites(), 64);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(LatticeSpec::new(2, &[5, 4]).is_err());
        assert!(LatticeSpec::new(1, &[4]).is_err());
        assert!(LatticeSpec::new(4, &[4, 4, 4, 4]).is_err());
        assert!(LatticeSpec::new(2, &[4, 4, 4]).is_err());
        assert!(LatticeSpec::new(2, &[0, 4]).is_err());
    }

    #[test]
    fn x_is_fastest_axis() {
        let l = LatticeSpec::new(2, &[4, 6]).unwrap();
        assert_eq!(l.index_of(&[1, 0]), 1);
        assert_eq!(l.index_of(&[0, 1]), 4);
        assert_eq!(l.coords_of(9), vec![1, 2]);
        assert_eq!(l.wrapped_index(&[-1, 6]), 3);
    }

    #[test]
    fn bond_counts() {
        let l = square(4);
        assert_eq!(NeighborTable::new(&l, 1).unwrap().bond_count(), 32);
        assert_eq!(NeighborTable::new(&l, 2).unwrap().bond_count(), 32);
        let c = LatticeSpec::new(3, &[4, 4, 4]).unwrap();
        assert_eq!(NeighborTable::new(&c, 1).unwrap().bond_count(), 192);
        assert!(matches!(
            NeighborTable::new(&c, 2),
            Err(Error::Unsupported(_))
        ));
    }

    fn check_symmetric_regular(table: &NeighborTable, degree: usize) {
        let n = table.num_sites();
        let adj = table.full_adjacency();
        assert_eq!(adj.len(), n * degree);
        let mut counts = std::collections::HashMap::new();
        for i in 0..n {
            for &j in &adj[i * degree..(i + 1) * degree] {
                *counts.entry((i, j)).or_insert(0) += 1;
            }
        }
        for (&(i, j), &c) in &counts {
            assert_eq!(counts.get(&(j, i)), Some(&c), "asymmetric pair ({i},{j})");
        }
    }

    #[test]
    fn adjacency_is_symmetric_and_regular() {
        check_symmetric_regular(&NeighborTable::new(&square(4), 1).unwrap(), 4);
        check_symmetric_regular(&NeighborTable::new(&square(6), 2).unwrap(), 4);
        check_symmetric_regular(&NeighborTable::new(&square(2), 1).unwrap(), 4);
        let c = LatticeSpec::new(3, &[4, 6, 4]).unwrap();
        check_symmetric_regular(&NeighborTable::new(&c, 1).unwrap(), 6);
    }

    #[test]
    fn diagonal_neighbors() {
        let l = square(4);
        let t = NeighborTable::new(&l, 2).unwrap();
        assert_eq!(
            t.forward(l.index_of(&[0, 0])),
            &[l.index_of(&[1, 1]), l.index_of(&[1, 3])]
        );
    }

    #[test]
    fn checkerboard_step() {
        let l = square(4);
        let m = SiteMask::new(&l, 1).unwrap();
        assert_eq!(m.len(), 8);
        for &s in m.retained() {
            let c = l.coords_of(s);
            assert_eq!((c[0] + c[1]) % 2, 0);
        }
    }

    #[test]
    fn two_steps_keep_even_even() {
        let l = square(4);
        let m = SiteMask::new(&l, 2).unwrap();
        let expected: Vec<usize> = [[0, 0], [2, 0], [0, 2], [2, 2]]
            .iter()
            .map(|c| l.index_of(c))
            .collect();
        let mut expected_sorted = expected.clone();
        expected_sorted.sort();
        assert_eq!(m.retained(), expected_sorted.as_slice());
        assert_eq!(m.frame().vectors(), &[vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn zero_steps_is_identity() {
        let l = LatticeSpec::new(3, &[4, 4, 2]).unwrap();
        let m = SiteMask::new(&l, 0).unwrap();
        assert_eq!(
            m.retained(),
            (0..l.num_sites()).collect::<Vec<_>>().as_slice()
        );
        for (site, u) in m.retained_coordinates() {
            let c: Vec<i64> = l.coords_of(site).iter().map(|&x| x as i64).collect();
            assert_eq!(u, c);
        }
    }

    #[test]
    fn frame_coordinates() {
        let l = square(4);
        let m1 = SiteMask::new(&l, 1).unwrap();
        assert_eq!(m1.frame().vectors(), &[vec![1, 1], vec![1, -1]]);
        let coords: std::collections::HashMap<_, _> =
            m1.retained_coordinates().into_iter().collect();
        assert_eq!(coords[&l.index_of(&[1, 1])], vec![1, 0]);
        let m2 = SiteMask::new(&l, 2).unwrap();
        let coords: std::collections::HashMap<_, _> =
            m2.retained_coordinates().into_iter().collect();
        assert_eq!(coords[&l.index_of(&[2, 2])], vec![1, 1]);
    }

    #[test]
    fn step_limits() {
        let l = square(4);
        assert_eq!(SiteMask::max_steps(&l), 3);
        assert!(matches!(
            SiteMask::new(&l, 4),
            Err(Error::TooManySteps { .. })
        ));
        assert_eq!(SiteMask::max_steps(&square(256)), 9);
        assert_eq!(SiteMask::max_steps(&square(2)), 2);
        // a 4x8 lattice can only go as far as its short side allows
        let r = LatticeSpec::new(2, &[4, 8]).unwrap();
        assert_eq!(SiteMask::max_steps(&r), 3);
        let c = LatticeSpec::new(3, &[4, 4, 4]).unwrap();
        assert!(SiteMask::max_steps(&c) >= 3);
        assert_eq!(SiteMask::new(&c, 3).unwrap().len(), 8);
    }

    #[test]
    fn three_d_first_step_is_parity() {
        let c = LatticeSpec::new(3, &[4, 4, 4]).unwrap();
        let m = SiteMask::new(&c, 1).unwrap();
        assert_eq!(m.len(), 32);
        for &s in m.retained() {
            let x = c.coords_of(s);
            assert_eq!((x[0] + x[1] + x[2]) % 2, 0);
        }
    }

    #[test]
    fn periods() {
        let l = square(8);
        let m1 = SiteMask::new(&l, 1).unwrap();
        assert_eq!(m1.period_along(&[1, 1]), 8);
        let m2 = SiteMask::new(&l, 2).unwrap();
        assert_eq!(m2.period_along(&[2, 0]), 4);
    }

    fn composed_by_parity(mask: &SiteMask) -> BTreeSet<usize> {
        mask.retained_coordinates()
            .into_iter()
            .filter(|(_, u)| u.iter().sum::<i64>().rem_euclid(2) == 0)
            .map(|(s, _)| s)
            .collect()
    }

    proptest! {
        #[test]
        fn coordinate_round_trip(dim in 2usize..=3, halves in prop::collection::vec(1usize..5, 3)) {
            let lengths: Vec<usize> = halves[..dim].iter().map(|h| 2 * h).collect();
            let l = LatticeSpec::new(dim, &lengths).unwrap();
            for i in 0..l.num_sites() {
                prop_assert_eq!(l.index_of(&l.coords_of(i)), i);
            }
        }

        #[test]
        fn masks_halve_and_compose(dim in 2usize..=3, log_side in 1u32..5) {
            let l = LatticeSpec::hypercubic(dim, 1 << log_side).unwrap();
            let max = SiteMask::max_steps(&l);
            let mut prev = SiteMask::new(&l, 0).unwrap();
            for n in 1..=max {
                let mask = SiteMask::new(&l, n).unwrap();
                prop_assert_eq!(mask.len(), l.num_sites() >> n);
                prop_assert!(mask.retained().windows(2).all(|w| w[0] < w[1]));
                let by_parity = composed_by_parity(&prev);
                let direct: BTreeSet<usize> = mask.retained().iter().copied().collect();
                prop_assert_eq!(by_parity, direct);
                prev = mask;
            }
        }
    }
}
