//! Hypercubic cell complexes in three and four dimensions and GF(2) chains on them.
//!
//! A complex is a product of `d` axes, each either periodic (a cycle with `L`
//! vertices) or open (a path with `L` vertices and `L - 1` edges). A k-cell is
//! a base coordinate plus a sorted set of `k` axes along which it extends one
//! lattice unit.
//!
//! Cells of each rank are indexed lexicographically: first by the position of
//! their axis subset in lexicographic order, then by base coordinate in
//! mixed radix with axis 0 varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, GF2Matrix};

pub const MAX_DIM: usize = 4;

/// Default cap on the total number of cells of all ranks.
pub const DEFAULT_MAX_CELLS: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    Open,
}

/// Which of a mutually dual pair of complexes a [`CellComplex`] plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeSide {
    Primal,
    Dual,
}

impl LatticeSide {
    pub fn flip(self) -> Self {
        match self {
            LatticeSide::Primal => LatticeSide::Dual,
            LatticeSide::Dual => LatticeSide::Primal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    /// Axis subset as a bit mask; the rank is its popcount.
    pub axes: u8,
    pub coord: [u32; MAX_DIM],
}

impl CellId {
    pub fn new(coord: [u32; MAX_DIM], axes: u8) -> Self {
        Self { axes, coord }
    }

    pub fn rank(&self) -> usize {
        self.axes.count_ones() as usize
    }

    pub fn has_axis(&self, a: usize) -> bool {
        self.axes >> a & 1 == 1
    }

    pub fn axis_list(&self) -> Vec<usize> {
        (0..MAX_DIM).filter(|&a| self.has_axis(a)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct RankTable {
    /// Axis masks of this rank, lexicographic.
    subsets: Vec<u8>,
    /// First index of each subset block.
    offsets: Vec<usize>,
    count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    dim: usize,
    lengths: Vec<usize>,
    bcs: Vec<BoundaryCondition>,
    side: LatticeSide,
    ranks: Vec<RankTable>,
    /// mask -> position of the mask within its rank's subset list
    subset_pos: [usize; 1 << MAX_DIM],
}

/// Lexicographic list of `k`-subsets of `0..d` as bit masks.
fn subsets_of_size(d: usize, k: usize) -> Vec<u8> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<u8>) {
        if cur.len() == k {
            out.push(cur.iter().fold(0u8, |m, &a| m | 1 << a));
            return;
        }
        for a in start..d {
            cur.push(a);
            rec(a + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

impl CellComplex {
    pub fn new(dim: usize, lengths: &[usize], bcs: &[BoundaryCondition]) -> Result<Self> {
        Self::with_cap(dim, lengths, bcs, DEFAULT_MAX_CELLS)
    }

    /// Fully periodic complex with the same extent along every axis.
    pub fn torus(dim: usize, size: usize) -> Result<Self> {
        Self::new(dim, &vec![size; dim], &vec![BoundaryCondition::Periodic; dim])
    }

    /// Fully open box with `size` vertices along every axis.
    pub fn open_box(lengths: &[usize]) -> Result<Self> {
        Self::new(
            lengths.len(),
            lengths,
            &vec![BoundaryCondition::Open; lengths.len()],
        )
    }

    pub fn with_cap(
        dim: usize,
        lengths: &[usize],
        bcs: &[BoundaryCondition],
        max_cells: usize,
    ) -> Result<Self> {
        if !(dim == 3 || dim == 4) {
            return Err(Error::DimensionMismatch(format!(
                "complex dimension must be 3 or 4, got {dim}"
            )));
        }
        if lengths.len() != dim || bcs.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{dim}-dimensional complex needs {dim} lengths and boundary conditions, got {} and {}",
                lengths.len(),
                bcs.len()
            )));
        }
        for (a, (&l, &bc)) in lengths.iter().zip(bcs).enumerate() {
            match bc {
                BoundaryCondition::Periodic if l < 2 => {
                    return Err(Error::DegenerateLattice(format!(
                        "periodic axis {a} has length {l} < 2"
                    )))
                }
                BoundaryCondition::Open if l < 1 => {
                    return Err(Error::DegenerateLattice(format!("open axis {a} is empty")))
                }
                _ => {}
            }
        }

        let mut cx = Self {
            dim,
            lengths: lengths.to_vec(),
            bcs: bcs.to_vec(),
            side: LatticeSide::Primal,
            ranks: Vec::with_capacity(dim + 1),
            subset_pos: [usize::MAX; 1 << MAX_DIM],
        };
        let mut total: u128 = 0;
        for k in 0..=dim {
            let subsets = subsets_of_size(dim, k);
            let mut offsets = Vec::with_capacity(subsets.len());
            let mut count = 0usize;
            for (pos, &mask) in subsets.iter().enumerate() {
                cx.subset_pos[mask as usize] = pos;
                offsets.push(count);
                let block: u128 = (0..dim).map(|a| cx.extent(a, mask) as u128).product();
                total += block;
                if total > max_cells as u128 {
                    return Err(Error::Resource(format!(
                        "complex would hold more than {max_cells} cells"
                    )));
                }
                count += block as usize;
            }
            cx.ranks.push(RankTable {
                subsets,
                offsets,
                count,
            });
        }
        Ok(cx)
    }

    /// Number of admissible base coordinates along `axis` for cells spanning `mask`.
    #[inline]
    fn extent(&self, axis: usize, mask: u8) -> usize {
        match self.bcs[axis] {
            BoundaryCondition::Periodic => self.lengths[axis],
            BoundaryCondition::Open if mask >> axis & 1 == 1 => self.lengths[axis] - 1,
            BoundaryCondition::Open => self.lengths[axis],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn boundary_conditions(&self) -> &[BoundaryCondition] {
        &self.bcs
    }

    pub fn side(&self) -> LatticeSide {
        self.side
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.bcs[axis] == BoundaryCondition::Periodic
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.bcs.iter().all(|&b| b == BoundaryCondition::Periodic)
    }

    pub fn count(&self, k: usize) -> usize {
        self.ranks.get(k).map_or(0, |r| r.count)
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|k| self.count(k)).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.ranks.iter().map(|r| r.count).sum()
    }

    /// Alternating sum of the cell counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    pub fn subsets(&self, k: usize) -> &[u8] {
        &self.ranks[k].subsets
    }

    /// Whether `cell` is a valid, reduced cell of this complex.
    pub fn contains(&self, cell: &CellId) -> bool {
        if cell.axes >> self.dim != 0 {
            return false;
        }
        (0..MAX_DIM).all(|a| {
            if a >= self.dim {
                cell.coord[a] == 0
            } else {
                (cell.coord[a] as usize) < self.extent(a, cell.axes)
            }
        })
    }

    pub fn index(&self, cell: &CellId) -> usize {
        debug_assert!(self.contains(cell), "cell {cell:?} not in complex");
        let k = cell.rank();
        let table = &self.ranks[k];
        let pos = self.subset_pos[cell.axes as usize];
        let mut idx = 0usize;
        for a in (0..self.dim).rev() {
            idx = idx * self.extent(a, cell.axes) + cell.coord[a] as usize;
        }
        table.offsets[pos] + idx
    }

    pub fn cell(&self, k: usize, index: usize) -> CellId {
        let table = &self.ranks[k];
        assert!(index < table.count, "cell index {index} out of range for rank {k}");
        let pos = match table.offsets.binary_search(&index) {
            Ok(mut p) => {
                // empty blocks share an offset with their successor
                while p + 1 < table.offsets.len() && table.offsets[p + 1] == index {
                    p += 1;
                }
                p
            }
            Err(p) => p - 1,
        };
        let mask = table.subsets[pos];
        let mut rest = index - table.offsets[pos];
        let mut coord = [0u32; MAX_DIM];
        for (a, c) in coord.iter_mut().enumerate().take(self.dim) {
            let e = self.extent(a, mask);
            *c = (rest % e) as u32;
            rest /= e;
        }
        CellId { axes: mask, coord }
    }

    pub fn cells(&self, k: usize) -> impl Iterator<Item = CellId> + '_ {
        (0..self.count(k)).map(move |i| self.cell(k, i))
    }

    /// Shift `coord` by `delta` along `axis`; `None` if it leaves an open axis.
    #[inline]
    fn shift(&self, coord: [u32; MAX_DIM], axis: usize, delta: i64) -> Option<[u32; MAX_DIM]> {
        let l = self.lengths[axis] as i64;
        let mut c = coord;
        let v = coord[axis] as i64 + delta;
        match self.bcs[axis] {
            BoundaryCondition::Periodic => c[axis] = v.rem_euclid(l) as u32,
            BoundaryCondition::Open => {
                if v < 0 || v >= l {
                    return None;
                }
                c[axis] = v as u32;
            }
        }
        Some(c)
    }

    /// The `2k` codimension-one faces of a k-cell.
    pub fn faces(&self, cell: &CellId) -> Vec<CellId> {
        let mut out = Vec::with_capacity(2 * cell.rank());
        for a in 0..self.dim {
            if !cell.has_axis(a) {
                continue;
            }
            let axes = cell.axes & !(1 << a);
            out.push(CellId::new(cell.coord, axes));
            let up = self
                .shift(cell.coord, a, 1)
                .expect("cells spanning an open axis stop short of its end");
            out.push(CellId::new(up, axes));
        }
        out
    }

    /// The (k+1)-cells having `cell` as a face.
    pub fn cofaces(&self, cell: &CellId) -> Vec<CellId> {
        let mut out = Vec::with_capacity(2 * (self.dim - cell.rank()));
        for a in 0..self.dim {
            if cell.has_axis(a) {
                continue;
            }
            let axes = cell.axes | 1 << a;
            let up = CellId::new(cell.coord, axes);
            if self.contains(&up) {
                out.push(up);
            }
            if let Some(down) = self.shift(cell.coord, a, -1) {
                let down = CellId::new(down, axes);
                if self.contains(&down) {
                    out.push(down);
                }
            }
        }
        out
    }

    pub fn face_indices(&self, k: usize, index: usize) -> Vec<usize> {
        let c = self.cell(k, index);
        self.faces(&c).iter().map(|f| self.index(f)).collect()
    }

    pub fn coface_indices(&self, k: usize, index: usize) -> Vec<usize> {
        let c = self.cell(k, index);
        self.cofaces(&c).iter().map(|f| self.index(f)).collect()
    }

    pub fn empty_chain(&self, k: usize) -> Chain {
        Chain::zero(k, self.count(k))
    }

    pub fn chain_from_cells(&self, k: usize, cells: impl IntoIterator<Item = CellId>) -> Chain {
        let mut c = self.empty_chain(k);
        for cell in cells {
            debug_assert_eq!(cell.rank(), k);
            c.toggle(self.index(&cell));
        }
        c
    }

    fn check_chain(&self, c: &Chain) -> Result<()> {
        if c.rank > self.dim || c.len() != self.count(c.rank) {
            return Err(Error::DimensionMismatch(format!(
                "rank-{} chain of length {} does not belong to this complex",
                c.rank,
                c.len()
            )));
        }
        Ok(())
    }

    pub fn boundary(&self, c: &Chain) -> Result<Chain> {
        self.check_chain(c)?;
        if c.rank == 0 {
            return Err(Error::Rank("boundary of a 0-chain".into()));
        }
        let mut out = self.empty_chain(c.rank - 1);
        for i in c.bits.ones() {
            for f in self.faces(&self.cell(c.rank, i)) {
                out.toggle(self.index(&f));
            }
        }
        Ok(out)
    }

    pub fn coboundary(&self, c: &Chain) -> Result<Chain> {
        self.check_chain(c)?;
        if c.rank >= self.dim {
            return Err(Error::Rank(format!(
                "coboundary of a {}-chain in dimension {}",
                c.rank, self.dim
            )));
        }
        let mut out = self.empty_chain(c.rank + 1);
        for i in c.bits.ones() {
            for f in self.cofaces(&self.cell(c.rank, i)) {
                out.toggle(self.index(&f));
            }
        }
        Ok(out)
    }

    /// Materialized boundary map from k-chains to (k-1)-chains.
    pub fn boundary_matrix(&self, k: usize) -> Result<GF2Matrix> {
        if k == 0 || k > self.dim {
            return Err(Error::Rank(format!("no boundary map out of rank {k}")));
        }
        let mut m = GF2Matrix::zeros(self.count(k - 1), self.count(k));
        for j in 0..self.count(k) {
            for i in self.face_indices(k, j) {
                let v = m.get(i, j);
                m.set(i, j, !v);
            }
        }
        Ok(m)
    }

    /// The complex whose k-cells are dual to this complex's (d-k)-cells.
    pub fn dual_complex(&self) -> Self {
        let mut d = self.clone();
        d.side = self.side.flip();
        d
    }

    /// Dual cell in [`Self::dual_complex`]. Mapping a dual cell back lands on
    /// the original cell, and faces map to cofaces.
    pub fn dual_cell(&self, cell: &CellId) -> Result<CellId> {
        if !self.is_fully_periodic() {
            return Err(Error::Unsupported(
                "dual cells need a fully periodic complex".into(),
            ));
        }
        let full = ((1u16 << self.dim) - 1) as u8;
        let comp = full & !cell.axes;
        let mut coord = cell.coord;
        for (a, c) in coord.iter_mut().enumerate().take(self.dim) {
            let l = self.lengths[a] as u32;
            match self.side {
                // primal (x, S) -> dual (x + e_S, S^c)
                LatticeSide::Primal if cell.has_axis(a) => *c = (*c + 1) % l,
                // dual (z, T) -> primal (z - e_{T^c}, T^c)
                LatticeSide::Dual if !cell.has_axis(a) => *c = (*c + l - 1) % l,
                _ => {}
            }
        }
        Ok(CellId::new(coord, comp))
    }

    pub fn dual_index(&self, k: usize, index: usize) -> Result<usize> {
        let d = self.dual_cell(&self.cell(k, index))?;
        Ok(self.index(&d))
    }

    /// Image of a k-chain as a (d-k)-chain of the dual complex.
    pub fn dual_chain(&self, c: &Chain) -> Result<Chain> {
        self.check_chain(c)?;
        let k = self.dim - c.rank;
        let mut out = Chain::zero(k, self.count(k));
        for i in c.bits.ones() {
            out.toggle(self.dual_index(c.rank, i)?);
        }
        Ok(out)
    }
}

/// A set of k-cells with GF(2) addition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    rank: usize,
    bits: BitVec,
}

impl Chain {
    pub fn zero(rank: usize, len: usize) -> Self {
        Self {
            rank,
            bits: BitVec::zeros(len),
        }
    }

    pub fn from_bits(rank: usize, bits: BitVec) -> Self {
        Self { rank, bits }
    }

    pub fn from_indices(rank: usize, len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        Self {
            rank,
            bits: BitVec::from_indices(len, idx),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn toggle(&mut self, i: usize) {
        self.bits.toggle(i);
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits.set(i, v);
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// Parity of the overlap with another chain of the same rank.
    pub fn pairing(&self, other: &Chain) -> bool {
        assert_eq!(self.rank, other.rank, "pairing chains of different rank");
        self.bits.dot(&other.bits)
    }

    pub fn add_assign(&mut self, other: &Chain) {
        assert_eq!(self.rank, other.rank, "adding chains of different rank");
        self.bits.xor_assign(&other.bits);
    }
}

impl std::ops::Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn random_chain(cx: &CellComplex, k: usize, rng: &mut ChaCha8Rng) -> Chain {
        let n = cx.count(k);
        Chain::from_indices(k, n, (0..n).filter(|_| rng.gen_bool(0.5)))
    }

    #[test]
    fn torus_cell_counts_match_enumeration() {
        let cx = CellComplex::torus(3, 3).unwrap();
        assert_eq!(cx.counts(), vec![27, 81, 81, 27]);
        let cx = CellComplex::torus(4, 2).unwrap();
        assert_eq!(cx.counts(), vec![16, 64, 96, 64, 16]);
        // brute force: count distinct (coord, subset) pairs
        for (d, l) in [(3usize, 3usize), (4, 2), (3, 4)] {
            let cx = CellComplex::torus(d, l).unwrap();
            for k in 0..=d {
                let mut n = 0;
                for mask in 0u8..(1 << d) {
                    if mask.count_ones() as usize == k {
                        n += l.pow(d as u32);
                    }
                }
                assert_eq!(cx.count(k), n);
                assert_eq!(cx.count(k), binom(d, k) * l.pow(d as u32));
            }
            assert_eq!(cx.euler_characteristic(), 0);
        }
    }

    #[test]
    fn index_is_a_bijection() {
        let bc = BoundaryCondition::Open;
        let p = BoundaryCondition::Periodic;
        for cx in [
            CellComplex::torus(3, 3).unwrap(),
            CellComplex::new(4, &[2, 3, 2, 4], &[p, bc, p, bc]).unwrap(),
            CellComplex::open_box(&[2, 2, 1]).unwrap(),
        ] {
            for k in 0..=cx.dim() {
                let mut seen = std::collections::HashSet::new();
                for i in 0..cx.count(k) {
                    let c = cx.cell(k, i);
                    assert!(cx.contains(&c));
                    assert_eq!(c.rank(), k);
                    assert_eq!(cx.index(&c), i);
                    assert!(seen.insert(c));
                }
            }
        }
    }

    #[test]
    fn degenerate_and_bad_inputs() {
        let p = BoundaryCondition::Periodic;
        assert!(matches!(
            CellComplex::new(3, &[1, 3, 3], &[p, p, p]),
            Err(Error::DegenerateLattice(_))
        ));
        assert!(matches!(
            CellComplex::new(2, &[3, 3], &[p, p]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            CellComplex::with_cap(4, &[10; 4], &[p; 4], 1000),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn single_layer_slab_euler_by_enumeration() {
        use BoundaryCondition::*;
        let cx = CellComplex::new(3, &[2, 2, 1], &[Periodic, Periodic, Open]).unwrap();
        // a 2x2 torus: 4 vertices, 8 links, 4 plaquettes, nothing above
        let mut counts = vec![0i64; 4];
        for (k, c) in counts.iter_mut().enumerate() {
            *c = cx.cells(k).count() as i64;
        }
        assert_eq!(counts, vec![4, 8, 4, 0]);
        assert_eq!(cx.euler_characteristic(), 0);

        let slab = CellComplex::open_box(&[2, 2, 1]).unwrap();
        assert_eq!(slab.counts(), vec![4, 4, 1, 0]);
        assert_eq!(slab.euler_characteristic(), 1);
    }

    #[test]
    fn plaquette_boundary_and_cube_surface() {
        let cx = CellComplex::torus(3, 3).unwrap();
        let plaq = CellId::new([1, 1, 1, 0], 0b011);
        let b = cx.boundary(&cx.chain_from_cells(2, [plaq])).unwrap();
        assert_eq!(b.weight(), 4);
        let cube = CellId::new([0, 2, 1, 0], 0b111);
        let faces = cx.chain_from_cells(2, cx.faces(&cube));
        assert_eq!(faces.weight(), 6);
        assert!(cx.boundary(&faces).unwrap().is_empty());
    }

    #[test]
    fn rank_errors() {
        let cx = CellComplex::torus(3, 2).unwrap();
        assert!(matches!(cx.boundary(&cx.empty_chain(0)), Err(Error::Rank(_))));
        assert!(matches!(
            cx.coboundary(&cx.empty_chain(3)),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn star_and_link_cofaces() {
        let cx = CellComplex::torus(3, 3).unwrap();
        let v = cx.chain_from_cells(0, [CellId::new([0, 0, 0, 0], 0)]);
        assert_eq!(cx.coboundary(&v).unwrap().weight(), 6);
        let cx4 = CellComplex::torus(4, 2).unwrap();
        let link = CellId::new([1, 0, 1, 0], 0b0100);
        assert_eq!(cx4.cofaces(&link).len(), 6);
        assert_eq!(
            cx4.coboundary(&cx4.chain_from_cells(1, [link])).unwrap().weight(),
            6
        );
    }

    #[test]
    fn boundary_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = BoundaryCondition::Periodic;
        let o = BoundaryCondition::Open;
        for cx in [
            CellComplex::torus(3, 2).unwrap(),
            CellComplex::torus(4, 2).unwrap(),
            CellComplex::new(4, &[3, 2, 2, 3], &[p, o, p, o]).unwrap(),
        ] {
            for k in 2..=cx.dim() {
                for _ in 0..50 {
                    let c = random_chain(&cx, k, &mut rng);
                    let bb = cx.boundary(&cx.boundary(&c).unwrap()).unwrap();
                    assert!(bb.is_empty());
                }
            }
        }
    }

    #[test]
    fn coboundary_is_adjoint_of_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = BoundaryCondition::Open;
        let p = BoundaryCondition::Periodic;
        for cx in [
            CellComplex::torus(3, 3).unwrap(),
            CellComplex::new(3, &[3, 2, 4], &[o, p, o]).unwrap(),
        ] {
            for k in 0..cx.dim() {
                for _ in 0..40 {
                    let a = random_chain(&cx, k, &mut rng);
                    let b = random_chain(&cx, k + 1, &mut rng);
                    let lhs = cx.coboundary(&a).unwrap().pairing(&b);
                    let rhs = a.pairing(&cx.boundary(&b).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn dual_cell_is_involutive_and_intertwines() {
        for cx in [CellComplex::torus(3, 3).unwrap(), CellComplex::torus(4, 2).unwrap()] {
            let dual = cx.dual_complex();
            let d = cx.dim();
            for k in 0..=d {
                for c in cx.cells(k) {
                    let dc = cx.dual_cell(&c).unwrap();
                    assert_eq!(dc.rank(), d - k);
                    assert_eq!(dual.dual_cell(&dc).unwrap(), c);
                    // faces of c are dual to cofaces of dc
                    let mut cof: Vec<_> = dual.cofaces(&dc);
                    cof.sort();
                    let mut mapped: Vec<_> =
                        cx.faces(&c).iter().map(|f| cx.dual_cell(f).unwrap()).collect();
                    mapped.sort();
                    assert_eq!(cof, mapped);
                }
            }
        }
    }

    #[test]
    fn dual_cell_ranks() {
        let cx3 = CellComplex::torus(3, 3).unwrap();
        let plaq = CellId::new([0, 1, 2, 0], 0b101);
        assert_eq!(cx3.dual_cell(&plaq).unwrap().rank(), 1);
        let vertex = CellId::new([2, 2, 2, 0], 0);
        assert_eq!(cx3.dual_cell(&vertex).unwrap().rank(), 3);
        let cx4 = CellComplex::torus(4, 3).unwrap();
        let p4 = CellId::new([0, 1, 2, 1], 0b1010);
        assert_eq!(cx4.dual_cell(&p4).unwrap().rank(), 2);
        let open = CellComplex::open_box(&[2, 2, 2]).unwrap();
        assert!(matches!(open.dual_cell(&vertex), Err(Error::Unsupported(_))));
    }
}
