//! Homology classes of GF(2) cycles on hypercubic tori.
//!
//! Representatives are straight axis-aligned k-tori through the origin and
//! detectors are the straight dual hyperplanes that cut them, so the pairing
//! between the two lists is the identity by construction.

use crate::error::{Error, Result};
use crate::lattice::{CellComplex, Chain};

/// Betti numbers from ranks of the boundary maps, b_k = n_k - rk d_k - rk d_{k+1}.
/// Works for any boundary conditions but costs a dense elimination per rank.
pub fn betti_numbers(cx: &CellComplex) -> Result<Vec<usize>> {
    let d = cx.dim();
    let ranks = (1..=d)
        .map(|k| cx.boundary_matrix(k).map(|m| m.rank()))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=d)
        .map(|k| {
            let below = if k == 0 { 0 } else { ranks[k - 1] };
            let above = if k == d { 0 } else { ranks[k] };
            cx.count(k) - below - above
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct HomologyBasis {
    rank: usize,
    /// Axis subset carried by each representative.
    sectors: Vec<u8>,
    representatives: Vec<Chain>,
    /// k-cells pierced by the dual hyperplane paired with each representative.
    detectors: Vec<Chain>,
}

/// Homology class as a bit mask over the basis.
pub type ClassLabel = u32;

impl HomologyBasis {
    /// Basis of the k-th homology of a fully periodic complex. Its size is
    /// the binomial coefficient C(d, k).
    pub fn new(cx: &CellComplex, k: usize) -> Result<Self> {
        if !cx.is_fully_periodic() {
            return Err(Error::Unsupported(
                "homology basis needs a fully periodic complex".into(),
            ));
        }
        Self::along_axes(cx, k, &(0..cx.dim()).collect::<Vec<_>>())
    }

    /// Windings restricted to the listed axes, which must be periodic. Other
    /// axes may be open; the detectors extend across them. Used for spacetime
    /// complexes, where only spatial windings carry logical information.
    pub fn along_axes(cx: &CellComplex, k: usize, axes: &[usize]) -> Result<Self> {
        if k > cx.dim() {
            return Err(Error::Rank(format!("rank {k} exceeds dimension {}", cx.dim())));
        }
        for &a in axes {
            if a >= cx.dim() || !cx.is_periodic(a) {
                return Err(Error::Unsupported(format!(
                    "winding axis {a} must be a periodic axis of the complex"
                )));
            }
        }
        let allowed: u8 = axes.iter().fold(0, |m, &a| m | 1 << a);
        let sectors: Vec<u8> = cx
            .subsets(k)
            .iter()
            .copied()
            .filter(|&s| s & !allowed == 0)
            .collect();
        let n = cx.count(k);
        let mut representatives = Vec::with_capacity(sectors.len());
        let mut detectors = Vec::with_capacity(sectors.len());
        for &s in &sectors {
            let mut rep = Chain::zero(k, n);
            let mut det = Chain::zero(k, n);
            for i in 0..n {
                let c = cx.cell(k, i);
                if c.axes != s {
                    continue;
                }
                let on_rep = (0..cx.dim()).all(|a| s >> a & 1 == 1 || c.coord[a] == 0);
                let on_det = (0..cx.dim()).all(|a| s >> a & 1 == 0 || c.coord[a] == 0);
                if on_rep {
                    rep.set(i, true);
                }
                if on_det {
                    det.set(i, true);
                }
            }
            representatives.push(rep);
            detectors.push(det);
        }
        Ok(Self {
            rank: k,
            sectors,
            representatives,
            detectors,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn sectors(&self) -> &[u8] {
        &self.sectors
    }

    pub fn representatives(&self) -> &[Chain] {
        &self.representatives
    }

    pub fn detectors(&self) -> &[Chain] {
        &self.detectors
    }

    /// Detector parities of an arbitrary chain. Only meaningful as a class
    /// label for cycles, but differences of labels of chains with equal
    /// boundary are class labels of their sum.
    pub fn detector_parities(&self, c: &Chain) -> ClassLabel {
        self.detectors
            .iter()
            .enumerate()
            .fold(0, |acc, (i, d)| acc | (c.pairing(d) as u32) << i)
    }

    /// Sum of representatives selected by `label`.
    pub fn representative_of(&self, label: ClassLabel) -> Chain {
        let mut out = Chain::zero(self.rank, self.representatives[0].len());
        for (i, r) in self.representatives.iter().enumerate() {
            if label >> i & 1 == 1 {
                out.add_assign(r);
            }
        }
        out
    }

    /// Homology class of a cycle.
    pub fn classify(&self, cx: &CellComplex, z: &Chain) -> Result<ClassLabel> {
        if z.rank() != self.rank {
            return Err(Error::Rank(format!(
                "classifying a {}-chain with a rank-{} basis",
                z.rank(),
                self.rank
            )));
        }
        if z.rank() > 0 && !cx.boundary(z)?.is_empty() {
            return Err(Error::Precondition("chain is not a cycle".into()));
        }
        Ok(self.detector_parities(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_betti_numbers_agree_with_the_basis() {
        let torus = CellComplex::torus(3, 3).unwrap();
        let from_basis: Vec<usize> = (0..=3).map(|k| HomologyBasis::new(&torus, k).unwrap().len()).collect();
        assert_eq!(betti_numbers(&torus).unwrap(), from_basis);
        let bx = CellComplex::open_box(&[3, 2, 4]).unwrap();
        assert_eq!(betti_numbers(&bx).unwrap(), vec![1, 0, 0, 0]);
    }
    use crate::lattice::BoundaryCondition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn betti_counts_on_tori() {
        let t3 = CellComplex::torus(3, 3).unwrap();
        assert_eq!(HomologyBasis::new(&t3, 1).unwrap().len(), 3);
        assert_eq!(HomologyBasis::new(&t3, 2).unwrap().len(), 3);
        let t4 = CellComplex::torus(4, 2).unwrap();
        assert_eq!(HomologyBasis::new(&t4, 1).unwrap().len(), 4);
        assert_eq!(HomologyBasis::new(&t4, 2).unwrap().len(), 6);
    }

    #[test]
    fn representatives_are_cycles_with_identity_pairing() {
        for cx in [CellComplex::torus(3, 3).unwrap(), CellComplex::torus(4, 2).unwrap()] {
            for k in 1..cx.dim() {
                let b = HomologyBasis::new(&cx, k).unwrap();
                for (i, r) in b.representatives().iter().enumerate() {
                    assert!(cx.boundary(r).unwrap().is_empty());
                    assert_eq!(b.classify(&cx, r).unwrap(), 1 << i);
                }
            }
        }
    }

    #[test]
    fn boundaries_are_trivial_and_labels_add() {
        let cx = CellComplex::torus(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b1 = HomologyBasis::new(&cx, 1).unwrap();
        for _ in 0..30 {
            let n = cx.count(2);
            let c = Chain::from_indices(2, n, (0..n).filter(|_| rng.gen_bool(0.3)));
            let z = cx.boundary(&c).unwrap();
            assert_eq!(b1.classify(&cx, &z).unwrap(), 0);
            let shifted = &z + &b1.representatives()[1];
            assert_eq!(b1.classify(&cx, &shifted).unwrap(), 0b010);
        }
        let sum = &b1.representatives()[0] + &b1.representatives()[2];
        assert_eq!(b1.classify(&cx, &sum).unwrap(), 0b101);
    }

    #[test]
    fn non_cycle_is_rejected() {
        let cx = CellComplex::torus(3, 2).unwrap();
        let b = HomologyBasis::new(&cx, 1).unwrap();
        let link = Chain::from_indices(1, cx.count(1), [0]);
        assert!(matches!(b.classify(&cx, &link), Err(Error::Precondition(_))));
    }

    #[test]
    fn open_axes_rejected_unless_excluded() {
        use BoundaryCondition::*;
        let cx = CellComplex::new(4, &[3, 3, 3, 4], &[Periodic, Periodic, Periodic, Open]).unwrap();
        assert!(matches!(HomologyBasis::new(&cx, 1), Err(Error::Unsupported(_))));
        let b = HomologyBasis::along_axes(&cx, 1, &[0, 1, 2]).unwrap();
        assert_eq!(b.len(), 3);
        for r in b.representatives() {
            assert!(cx.boundary(r).unwrap().is_empty());
        }
    }
}
