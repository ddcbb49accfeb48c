//! Bit-packed linear algebra over GF(2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Fixed-length bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVec[{}]{{", self.len)?;
        let mut first = true;
        for i in self.ones() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones_of_len(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.toggle(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_count(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        self.and_count(other) % 2 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Hex dump: bit `i` lives at bit `i % 64` of word `i / 64`,
    /// words emitted lowest first, each as 16 hex digits.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.words.len() * 16);
        for w in &self.words {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        let n_words = len.div_ceil(WORD);
        if hex.len() != n_words * 16 {
            return Err(Error::Parse(format!(
                "hex bit vector of length {len} needs {} digits, got {}",
                n_words * 16,
                hex.len()
            )));
        }
        let mut words = Vec::with_capacity(n_words);
        for i in 0..n_words {
            let chunk = &hex[i * 16..(i + 1) * 16];
            let w = u64::from_str_radix(chunk, 16)
                .map_err(|e| Error::Parse(format!("bad hex word {chunk:?}: {e}")))?;
            words.push(w);
        }
        let v = Self { len, words };
        let mut check = v.clone();
        check.clear_tail();
        if check != v {
            return Err(Error::Parse("hex bit vector has bits beyond its length".into()));
        }
        Ok(v)
    }
}

impl std::ops::BitXor for &BitVec {
    type Output = BitVec;
    fn bitxor(self, rhs: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl std::ops::BitXorAssign<&BitVec> for BitVec {
    fn bitxor_assign(&mut self, rhs: &BitVec) {
        self.xor_assign(rhs);
    }
}

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GF2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self { cols, rows })
    }

    /// Builds the matrix whose column `j` is `columns[j]`.
    pub fn from_columns(n_rows: usize, columns: &[BitVec]) -> Result<Self> {
        let mut m = Self::zeros(n_rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Error::DimensionMismatch(format!(
                    "column of length {} in matrix with {n_rows} rows",
                    c.len()
                )));
            }
            for i in c.ones() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i].set(j, v);
    }

    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(BitVec::from_bools(
            &self.rows.iter().map(|r| r.dot(x)).collect::<Vec<_>>(),
        ))
    }

    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let pivots = reduce_in_place(&mut rows, self.cols, None);
        rows.truncate(pivots.len());
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Any `x` with `self · x = rhs`, or `None` when `rhs` is outside the column space.
    pub fn solve(&self, rhs: &BitVec) -> Result<Option<BitVec>> {
        if rhs.len() != self.rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} against {} rows",
                rhs.len(),
                self.rows.len()
            )));
        }
        let mut rows = self.rows.clone();
        let mut aug: Vec<bool> = (0..rhs.len()).map(|i| rhs.get(i)).collect();
        let pivots = reduce_in_place(&mut rows, self.cols, Some(&mut aug));
        if aug[pivots.len()..].iter().any(|&b| b) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if aug[r] {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.cols);
                v.set(f, true);
                for (r, &c) in ech.pivots.iter().enumerate() {
                    if ech.rows[r].get(f) {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect()
    }
}

/// Gauss-Jordan elimination to reduced row echelon form. Rows beyond the
/// returned pivot count are zero; `aug` follows the same row operations.
fn reduce_in_place(rows: &mut [BitVec], cols: usize, mut aug: Option<&mut Vec<bool>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        if let Some(a) = aug.as_deref_mut() {
            a.swap(r, p);
        }
        let pivot_row = rows[r].clone();
        let pivot_aug = aug.as_deref().map(|a| a[r]);
        for i in 0..rows.len() {
            if i != r && rows[i].get(c) {
                rows[i].xor_assign(&pivot_row);
                if let (Some(a), Some(pa)) = (aug.as_deref_mut(), pivot_aug) {
                    a[i] ^= pa;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A subspace held in reduced echelon form, used to pick canonical coset
/// representatives.
#[derive(Clone, Debug)]
pub struct Subspace {
    dim: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(dim: usize, generators: impl IntoIterator<Item = BitVec>) -> Result<Self> {
        let gens: Vec<BitVec> = generators.into_iter().collect();
        let m = GF2Matrix::from_rows(dim, gens)?;
        let ech = m.echelon();
        Ok(Self {
            dim,
            basis: ech.rows,
            pivots: ech.pivots,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    /// Unique representative of `v + span` whose pivot coordinates are all zero.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut out = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_rank_and_zero_rank() {
        assert_eq!(GF2Matrix::identity(5).rank(), 5);
        assert_eq!(GF2Matrix::zeros(4, 7).rank(), 0);
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let rhs = BitVec::from_indices(6, [0, 3, 5]);
        let x = GF2Matrix::identity(6).solve(&rhs).unwrap().unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn inconsistent_rhs_has_no_solution() {
        // rows 0 and 1 are equal, so rhs must agree on them
        let rows = vec![
            BitVec::from_indices(3, [0, 1]),
            BitVec::from_indices(3, [0, 1]),
            BitVec::from_indices(3, [2]),
        ];
        let m = GF2Matrix::from_rows(3, rows).unwrap();
        let rhs = BitVec::from_indices(3, [0]);
        assert!(m.solve(&rhs).unwrap().is_none());
    }

    #[test]
    fn solve_dimension_mismatch() {
        let m = GF2Matrix::identity(3);
        assert!(matches!(
            m.solve(&BitVec::zeros(4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn hex_round_trip_and_rejects_tail_bits() {
        let v = BitVec::from_indices(70, [0, 7, 64, 69]);
        let h = v.to_hex();
        assert_eq!(BitVec::from_hex(70, &h).unwrap(), v);
        let bad = BitVec::ones_of_len(128).to_hex();
        assert!(BitVec::from_hex(70, &bad).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = GF2Matrix> {
        (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    GF2Matrix::from_rows(c, rows.iter().map(|b| BitVec::from_bools(b)).collect())
                        .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let ns = m.nullspace();
            prop_assert_eq!(m.rank() + ns.len(), m.n_cols());
            for v in &ns {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
        }

        #[test]
        fn solve_recovers_image(m in arb_matrix(), seed in any::<u64>()) {
            let x0 = BitVec::from_bools(
                &(0..m.n_cols()).map(|i| (seed >> (i % 64)) & 1 == 1).collect::<Vec<_>>(),
            );
            let b = m.mul_vec(&x0).unwrap();
            let x = m.solve(&b).unwrap().expect("image vector must be solvable");
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
        }

        #[test]
        fn subspace_reduce_is_canonical(m in arb_matrix(), seed in any::<u64>()) {
            let rows: Vec<BitVec> = (0..m.n_rows()).map(|i| m.row(i).clone()).collect();
            let s = Subspace::span(m.n_cols(), rows.clone()).unwrap();
            let v = BitVec::from_bools(
                &(0..m.n_cols()).map(|i| (seed >> (i % 64)) & 1 == 1).collect::<Vec<_>>(),
            );
            let mut w = v.clone();
            for (i, r) in rows.iter().enumerate() {
                if (seed >> ((i + 7) % 64)) & 1 == 1 {
                    w.xor_assign(r);
                }
            }
            prop_assert_eq!(s.reduce(&v), s.reduce(&w));
        }
    }
}
