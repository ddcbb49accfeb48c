//! Random spin models with one interaction per lattice cell.
//!
//! Every model here is a hypergraph: Ising spins live on the cells of one
//! rank and each interaction term is the product of the spins incident to a
//! cell of a neighbouring rank. In the usual ("boundary") form the spins of a
//! term are the faces of the term cell; the "coboundary" form uses cofaces
//! instead and arises when the same model is written on the dual lattice.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::lattice::{BoundaryCondition, CellComplex, Chain, LatticeSide};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// 3D random-bond Ising model: vertex spins, link terms.
    #[serde(rename = "RBIM3")]
    Rbim3,
    /// 3D random-plaquette gauge model: link spins, plaquette terms.
    #[serde(rename = "RPGM3")]
    Rpgm3,
    /// 4D random-plaquette gauge model.
    #[serde(rename = "RPGM4")]
    Rpgm4,
    /// 4D random-cube 2-form gauge model: plaquette spins, cube terms.
    #[serde(rename = "RCGM4")]
    Rcgm4,
    /// 4D random-bond Ising model.
    #[serde(rename = "RBIM4")]
    Rbim4,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Rbim3,
        ModelKind::Rpgm3,
        ModelKind::Rpgm4,
        ModelKind::Rcgm4,
        ModelKind::Rbim4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rbim3 => "RBIM3",
            ModelKind::Rpgm3 => "RPGM3",
            ModelKind::Rpgm4 => "RPGM4",
            ModelKind::Rcgm4 => "RCGM4",
            ModelKind::Rbim4 => "RBIM4",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ModelKind::Rbim3 | ModelKind::Rpgm3 => 3,
            _ => 4,
        }
    }

    pub fn spin_rank(self) -> usize {
        match self {
            ModelKind::Rbim3 | ModelKind::Rbim4 => 0,
            ModelKind::Rpgm3 | ModelKind::Rpgm4 => 1,
            ModelKind::Rcgm4 => 2,
        }
    }

    pub fn term_rank(self) -> usize {
        self.spin_rank() + 1
    }

    /// Spins per term in the boundary form.
    pub fn arity(self) -> usize {
        2 * self.term_rank()
    }

    pub fn has_gauge_symmetry(self) -> bool {
        self.spin_rank() > 0
    }

    pub fn has_magnetization(self) -> bool {
        self.spin_rank() == 0
    }

    /// Kramers-Wannier partner.
    pub fn dual(self) -> ModelKind {
        match self {
            ModelKind::Rbim3 => ModelKind::Rpgm3,
            ModelKind::Rpgm3 => ModelKind::Rbim3,
            ModelKind::Rpgm4 => ModelKind::Rpgm4,
            ModelKind::Rcgm4 => ModelKind::Rbim4,
            ModelKind::Rbim4 => ModelKind::Rcgm4,
        }
    }

    /// Which terms carry the measurement-error coupling when the model comes
    /// from a spacetime error history with time along the last axis.
    pub fn default_temporal_terms(self) -> TemporalTerms {
        match self {
            ModelKind::Rbim3 | ModelKind::Rpgm3 => TemporalTerms::None,
            ModelKind::Rbim4 => TemporalTerms::ContainingTime,
            ModelKind::Rpgm4 | ModelKind::Rcgm4 => TemporalTerms::TransverseToTime,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown model kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    Boundary,
    Coboundary,
}

/// Rule selecting the terms that use the temporal coupling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalTerms {
    None,
    /// Term cells that extend along the time axis.
    ContainingTime,
    /// Term cells lying inside a time slice.
    TransverseToTime,
}

/// Serializable description of a model, sufficient to rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    pub dim: usize,
    pub lengths: Vec<usize>,
    pub boundary_conditions: Vec<BoundaryCondition>,
    pub side: LatticeSide,
    pub incidence: Incidence,
    pub spin_rank: usize,
    pub term_rank: usize,
    pub temporal_terms: TemporalTerms,
    /// K/J, the ratio of temporal to spatial coupling.
    pub temporal_coupling: f64,
}

#[derive(Clone, Debug)]
pub struct SpinModel {
    kind: ModelKind,
    complex: Arc<CellComplex>,
    spin_rank: usize,
    term_rank: usize,
    incidence: Incidence,
    term_offsets: Vec<u32>,
    term_members: Vec<u32>,
    spin_offsets: Vec<u32>,
    spin_terms: Vec<u32>,
    /// 0 = spatial, 1 = temporal
    term_class: Vec<u8>,
    temporal_terms: TemporalTerms,
    temporal_coupling: f64,
}

/// Inverse coupling e^{-2 beta J} = p / (1 - p) along the Nishimori line.
pub fn nishimori_beta(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "Nishimori coupling needs 0 < p < 1, got {p}"
        )));
    }
    Ok(0.5 * ((1.0 - p) / p).ln())
}

/// Error rate on the Nishimori line for a given coupling.
pub fn nishimori_p(beta_j: f64) -> f64 {
    1.0 / (1.0 + (2.0 * beta_j).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NishimoriPoint {
    pub p: f64,
    pub beta_j: f64,
}

impl NishimoriPoint {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p,
            beta_j: nishimori_beta(p)?,
        })
    }
}

impl SpinModel {
    /// Boundary-form model of the given kind on `cx`.
    pub fn build(kind: ModelKind, cx: Arc<CellComplex>) -> Result<Self> {
        if cx.dim() != kind.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{kind} needs a {}-dimensional complex, got {}",
                kind.dim(),
                cx.dim()
            )));
        }
        Self::from_incidence(kind, cx, kind.spin_rank(), Incidence::Boundary)
    }

    /// Model with spins on `spin_rank` cells and terms on the cells one rank
    /// below, each term coupling the spins on its cofaces.
    pub fn cofacial(kind: ModelKind, cx: Arc<CellComplex>, spin_rank: usize) -> Result<Self> {
        if spin_rank == 0 || spin_rank > cx.dim() {
            return Err(Error::Rank(format!(
                "coface model needs spins of rank 1..={}, got {spin_rank}",
                cx.dim()
            )));
        }
        Self::from_incidence(kind, cx, spin_rank, Incidence::Coboundary)
    }

    fn from_incidence(
        kind: ModelKind,
        cx: Arc<CellComplex>,
        spin_rank: usize,
        incidence: Incidence,
    ) -> Result<Self> {
        let term_rank = match incidence {
            Incidence::Boundary => spin_rank + 1,
            Incidence::Coboundary => spin_rank - 1,
        };
        if term_rank > cx.dim() {
            return Err(Error::Rank(format!(
                "term rank {term_rank} exceeds dimension {}",
                cx.dim()
            )));
        }
        let n_terms = cx.count(term_rank);
        let n_spins = cx.count(spin_rank);
        if n_spins > u32::MAX as usize || n_terms > u32::MAX as usize {
            return Err(Error::Resource("model too large for 32-bit indices".into()));
        }
        let mut term_offsets = Vec::with_capacity(n_terms + 1);
        let mut term_members = Vec::new();
        term_offsets.push(0u32);
        for t in 0..n_terms {
            let members = match incidence {
                Incidence::Boundary => cx.face_indices(term_rank, t),
                Incidence::Coboundary => cx.coface_indices(term_rank, t),
            };
            term_members.extend(members.into_iter().map(|s| s as u32));
            term_offsets.push(term_members.len() as u32);
        }
        let (spin_offsets, spin_terms) = invert_incidence(n_spins, &term_offsets, &term_members);
        Ok(Self {
            kind,
            complex: cx,
            spin_rank,
            term_rank,
            incidence,
            term_offsets,
            term_members,
            spin_offsets,
            spin_terms,
            term_class: vec![0; n_terms],
            temporal_terms: TemporalTerms::None,
            temporal_coupling: 1.0,
        })
    }

    /// Marks temporal terms (time along the last axis) and sets K/J.
    pub fn with_anisotropy(mut self, rule: TemporalTerms, temporal_coupling: f64) -> Result<Self> {
        if !temporal_coupling.is_finite() {
            return Err(Error::Domain("temporal coupling must be finite".into()));
        }
        let time = self.complex.dim() - 1;
        for t in 0..self.n_terms() {
            let along_time = self.complex.cell(self.term_rank, t).has_axis(time);
            self.term_class[t] = match rule {
                TemporalTerms::None => 0,
                TemporalTerms::ContainingTime => along_time as u8,
                TemporalTerms::TransverseToTime => (!along_time) as u8,
            };
        }
        self.temporal_terms = rule;
        self.temporal_coupling = temporal_coupling;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn spin_rank(&self) -> usize {
        self.spin_rank
    }

    pub fn term_rank(&self) -> usize {
        self.term_rank
    }

    pub fn incidence(&self) -> Incidence {
        self.incidence
    }

    pub fn n_spins(&self) -> usize {
        self.spin_offsets.len() - 1
    }

    pub fn n_terms(&self) -> usize {
        self.term_offsets.len() - 1
    }

    #[inline]
    pub fn term_members(&self, t: usize) -> &[u32] {
        &self.term_members[self.term_offsets[t] as usize..self.term_offsets[t + 1] as usize]
    }

    #[inline]
    pub fn spin_terms(&self, s: usize) -> &[u32] {
        &self.spin_terms[self.spin_offsets[s] as usize..self.spin_offsets[s + 1] as usize]
    }

    #[inline]
    pub fn term_class(&self, t: usize) -> u8 {
        self.term_class[t]
    }

    pub fn term_classes(&self) -> &[u8] {
        &self.term_class
    }

    pub fn temporal_coupling(&self) -> f64 {
        self.temporal_coupling
    }

    /// Coupling J of a term in units of the spatial coupling.
    #[inline]
    pub fn coupling(&self, t: usize) -> f64 {
        if self.term_class[t] == 0 {
            1.0
        } else {
            self.temporal_coupling
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_spins())
            .map(|s| self.spin_terms(s).len())
            .max()
            .unwrap_or(0)
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            kind: self.kind,
            dim: self.complex.dim(),
            lengths: self.complex.lengths().to_vec(),
            boundary_conditions: self.complex.boundary_conditions().to_vec(),
            side: self.complex.side(),
            incidence: self.incidence,
            spin_rank: self.spin_rank,
            term_rank: self.term_rank,
            temporal_terms: self.temporal_terms,
            temporal_coupling: self.temporal_coupling,
        }
    }

    pub fn from_descriptor(d: &ModelDescriptor) -> Result<Self> {
        let mut cx = CellComplex::new(d.dim, &d.lengths, &d.boundary_conditions)?;
        if cx.side() != d.side {
            cx = cx.dual_complex();
        }
        let cx = Arc::new(cx);
        let m = match d.incidence {
            Incidence::Boundary => Self::from_incidence(d.kind, cx, d.spin_rank, Incidence::Boundary)?,
            Incidence::Coboundary => Self::cofacial(d.kind, cx, d.spin_rank)?,
        };
        m.with_anisotropy(d.temporal_terms, d.temporal_coupling)
    }

    /// Product of the member spins of term `t`.
    #[inline]
    pub fn term_value(&self, spins: &[i8], t: usize) -> i8 {
        self.term_members(t)
            .iter()
            .fold(1i8, |acc, &s| acc * spins[s as usize])
    }

    pub fn term_values(&self, spins: &[i8]) -> Vec<i8> {
        (0..self.n_terms()).map(|t| self.term_value(spins, t)).collect()
    }

    fn check_lengths(&self, spins: &[i8], d: &DisorderSample) -> Result<()> {
        if spins.len() != self.n_spins() {
            return Err(Error::DimensionMismatch(format!(
                "{} spins given for a model with {}",
                spins.len(),
                self.n_spins()
            )));
        }
        if d.len() != self.n_terms() {
            return Err(Error::DimensionMismatch(format!(
                "disorder over {} terms for a model with {}",
                d.len(),
                self.n_terms()
            )));
        }
        Ok(())
    }

    /// H = -sum_t J_t eta_t prod_{s in t} sigma_s with spatial J = 1.
    pub fn energy(&self, spins: &[i8], d: &DisorderSample) -> Result<f64> {
        self.check_lengths(spins, d)?;
        Ok(-(0..self.n_terms())
            .map(|t| self.coupling(t) * (d.eta(t) * self.term_value(spins, t)) as f64)
            .sum::<f64>())
    }

    /// Energy change from flipping spin `s`.
    pub fn delta_energy(&self, spins: &[i8], d: &DisorderSample, s: usize) -> f64 {
        2.0 * self
            .spin_terms(s)
            .iter()
            .map(|&t| {
                let t = t as usize;
                self.coupling(t) * (d.eta(t) * self.term_value(spins, t)) as f64
            })
            .sum::<f64>()
    }

    /// Spin flip sets that leave every term invariant, one per cell of the
    /// rank adjacent to the spins on the side away from the terms.
    /// Empty for models with no such cells.
    pub fn local_symmetries(&self) -> Vec<Vec<u32>> {
        let cx = &self.complex;
        match self.incidence {
            Incidence::Boundary if self.spin_rank > 0 => (0..cx.count(self.spin_rank - 1))
                .map(|g| {
                    cx.coface_indices(self.spin_rank - 1, g)
                        .into_iter()
                        .map(|s| s as u32)
                        .collect()
                })
                .collect(),
            Incidence::Coboundary if self.spin_rank < cx.dim() => (0..cx.count(self.spin_rank + 1))
                .map(|g| {
                    cx.face_indices(self.spin_rank + 1, g)
                        .into_iter()
                        .map(|s| s as u32)
                        .collect()
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Gauge generators of the gauge models; RBIM kinds have none.
    pub fn gauge_generators(&self) -> Result<Vec<Vec<u32>>> {
        if !self.kind.has_gauge_symmetry() {
            return Err(Error::NoGaugeSymmetry(self.kind.to_string()));
        }
        Ok(self.local_symmetries())
    }

    /// Model whose spins sit on this model's constraint cells, with one term per
    /// original term. Exact Kramers-Wannier partner at zero disorder when the
    /// complex has no cohomology in the term rank.
    pub fn constraint_partner(&self) -> Result<SpinModel> {
        let cx = self.complex.clone();
        match self.incidence {
            Incidence::Boundary => {
                if self.term_rank + 1 > cx.dim() {
                    return Err(Error::Rank("no constraint cells above the term rank".into()));
                }
                SpinModel::cofacial(self.kind.dual(), cx, self.term_rank + 1)
            }
            Incidence::Coboundary => {
                if self.term_rank == 0 {
                    return Err(Error::Rank("no constraint cells below the term rank".into()));
                }
                SpinModel::from_incidence(self.kind.dual(), cx, self.term_rank - 1, Incidence::Boundary)
            }
        }
    }

    /// SHA-256 over the sorted term hypergraph; equal for models with
    /// identical incidence regardless of how they were constructed.
    pub fn incidence_hash(&self) -> String {
        canonical_hash(
            self.n_spins(),
            (0..self.n_terms()).map(|t| self.term_members(t).to_vec()),
        )
    }
}

/// SHA-256 of a hypergraph given as spin count and term member lists,
/// insensitive to the order of terms and of members within a term.
pub fn canonical_hash(n_spins: usize, terms: impl IntoIterator<Item = Vec<u32>>) -> String {
    let mut terms: Vec<Vec<u32>> = terms
        .into_iter()
        .map(|mut m| {
            m.sort_unstable();
            m
        })
        .collect();
    terms.sort();
    let mut h = Sha256::new();
    h.update((n_spins as u64).to_le_bytes());
    h.update((terms.len() as u64).to_le_bytes());
    for t in &terms {
        h.update((t.len() as u32).to_le_bytes());
        for s in t {
            h.update(s.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn invert_incidence(n_spins: usize, term_offsets: &[u32], term_members: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut deg = vec![0u32; n_spins + 1];
    for &s in term_members {
        deg[s as usize + 1] += 1;
    }
    for i in 0..n_spins {
        deg[i + 1] += deg[i];
    }
    let offsets = deg.clone();
    let mut fill = deg;
    let mut terms = vec![0u32; term_members.len()];
    for t in 0..term_offsets.len() - 1 {
        for &s in &term_members[term_offsets[t] as usize..term_offsets[t + 1] as usize] {
            terms[fill[s as usize] as usize] = t as u32;
            fill[s as usize] += 1;
        }
    }
    (offsets, terms)
}

/// Where a disorder sample came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderSource {
    Sampled { seed: u64 },
    /// Drawn from stream `stream` of a generator seeded with `seed`.
    Stream { seed: u64, stream: u64 },
    ErrorChain,
    Uniform,
}

/// Quenched coupling signs, one per term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderSample {
    /// Bit set where eta = -1.
    flipped: BitVec,
    pub p: f64,
    pub q: Option<f64>,
    pub source: DisorderSource,
}

impl DisorderSample {
    pub fn uniform(n_terms: usize) -> Self {
        Self {
            flipped: BitVec::zeros(n_terms),
            p: 0.0,
            q: None,
            source: DisorderSource::Uniform,
        }
    }

    pub fn from_flipped(flipped: BitVec, p: f64, source: DisorderSource) -> Self {
        Self {
            flipped,
            p,
            q: None,
            source,
        }
    }

    /// I.i.d. signs, negative with probability `p`.
    pub fn sample(model: &SpinModel, p: f64, seed: u64) -> Result<Self> {
        Self::sample_anisotropic(model, p, None, seed)
    }

    /// Spatial terms flip with probability `p`, temporal terms with `q`
    /// (defaulting to `p`).
    pub fn sample_anisotropic(model: &SpinModel, p: f64, q: Option<f64>, seed: u64) -> Result<Self> {
        for r in std::iter::once(p).chain(q) {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Domain(format!("error rate {r} outside [0, 1]")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::sample_with(model, p, q, &mut rng, DisorderSource::Sampled { seed })
    }

    /// Draws the signs from a caller-supplied generator.
    pub fn sample_with(
        model: &SpinModel,
        p: f64,
        q: Option<f64>,
        rng: &mut impl Rng,
        source: DisorderSource,
    ) -> Result<Self> {
        for r in std::iter::once(p).chain(q) {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Domain(format!("error rate {r} outside [0, 1]")));
            }
        }
        let qq = q.unwrap_or(p);
        let mut flipped = BitVec::zeros(model.n_terms());
        for t in 0..model.n_terms() {
            let rate = if model.term_class(t) == 0 { p } else { qq };
            if rng.gen_bool(rate) {
                flipped.set(t, true);
            }
        }
        Ok(Self { flipped, p, q, source })
    }

    /// eta_t = -1 exactly on the cells of the chain.
    pub fn from_error_chain(model: &SpinModel, e: &Chain) -> Result<Self> {
        if e.rank() != model.term_rank() || e.len() != model.n_terms() {
            return Err(Error::Rank(format!(
                "rank-{} chain of length {} cannot seed disorder on rank-{} terms ({} of them)",
                e.rank(),
                e.len(),
                model.term_rank(),
                model.n_terms()
            )));
        }
        Ok(Self {
            flipped: e.bits().clone(),
            p: f64::NAN,
            q: None,
            source: DisorderSource::ErrorChain,
        })
    }

    pub fn len(&self) -> usize {
        self.flipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flipped.is_empty()
    }

    #[inline]
    pub fn eta(&self, t: usize) -> i8 {
        if self.flipped.get(t) {
            -1
        } else {
            1
        }
    }

    pub fn flipped(&self) -> &BitVec {
        &self.flipped
    }

    pub fn n_flipped(&self) -> usize {
        self.flipped.count_ones()
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len()).map(|t| self.eta(t)).collect()
    }

    pub fn to_hex(&self) -> String {
        self.flipped.to_hex()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn torus(d: usize, l: usize) -> Arc<CellComplex> {
        Arc::new(CellComplex::torus(d, l).unwrap())
    }

    fn random_spins(n: usize, rng: &mut ChaCha8Rng) -> Vec<i8> {
        (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
    }

    #[test]
    fn nishimori_values() {
        assert_eq!(nishimori_beta(0.5).unwrap(), 0.0);
        assert!((nishimori_beta(0.1).unwrap() - 0.5 * 9f64.ln()).abs() < 1e-15);
        assert!((nishimori_beta(0.1).unwrap() - 1.09861).abs() < 1e-5);
        assert!((nishimori_beta(0.02).unwrap() - 1.94591).abs() < 1e-5);
        // re-substitution
        let b = nishimori_beta(0.1).unwrap();
        assert!(((-2.0 * b).exp() - 1.0 / 9.0).abs() < 1e-15);
        for p in [0.0, 1.0, -0.1, 1.5] {
            assert!(matches!(nishimori_beta(p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn nishimori_round_trip_and_monotone() {
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let b = nishimori_beta(p).unwrap();
            assert!((nishimori_p(b) - p).abs() < 1e-14);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn model_sizes() {
        let m = SpinModel::build(ModelKind::Rpgm3, torus(3, 2)).unwrap();
        assert_eq!((m.n_spins(), m.n_terms()), (24, 24));
        assert!((0..m.n_terms()).all(|t| m.term_members(t).len() == 4));
        let m = SpinModel::build(ModelKind::Rcgm4, torus(4, 2)).unwrap();
        assert_eq!((m.n_spins(), m.n_terms()), (96, 64));
        assert!((0..m.n_terms()).all(|t| m.term_members(t).len() == 6));
        let m = SpinModel::build(ModelKind::Rbim3, torus(3, 3)).unwrap();
        assert_eq!((m.n_spins(), m.n_terms()), (27, 81));
        assert!((0..m.n_terms()).all(|t| m.term_members(t).len() == 2));
        for kind in ModelKind::ALL {
            let m = SpinModel::build(kind, torus(kind.dim(), 3)).unwrap();
            assert!((0..m.n_terms()).all(|t| m.term_members(t).len() == kind.arity()));
        }
        assert!(matches!(
            SpinModel::build(ModelKind::Rpgm4, torus(3, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn disorder_limits_and_rate() {
        let m = SpinModel::build(ModelKind::Rbim3, torus(3, 3)).unwrap();
        assert_eq!(DisorderSample::sample(&m, 0.0, 1).unwrap().n_flipped(), 0);
        assert_eq!(DisorderSample::sample(&m, 1.0, 1).unwrap().n_flipped(), m.n_terms());
        let big = SpinModel::build(ModelKind::Rbim3, torus(3, 33)).unwrap();
        let n = big.n_terms() as f64;
        assert!(n >= 1e5);
        let d = DisorderSample::sample(&big, 0.1, 42).unwrap();
        let sigma = (n * 0.1 * 0.9).sqrt();
        assert!((d.n_flipped() as f64 - 0.1 * n).abs() < 3.0 * sigma);
        // reproducible
        assert_eq!(d, DisorderSample::sample(&big, 0.1, 42).unwrap());
    }

    #[test]
    fn disorder_from_chain() {
        let m = SpinModel::build(ModelKind::Rpgm3, torus(3, 2)).unwrap();
        let cx = m.complex().clone();
        let empty = DisorderSample::from_error_chain(&m, &cx.empty_chain(2)).unwrap();
        assert_eq!(empty.n_flipped(), 0);
        let mut full = cx.empty_chain(2);
        (0..full.len()).for_each(|i| full.set(i, true));
        assert_eq!(
            DisorderSample::from_error_chain(&m, &full).unwrap().n_flipped(),
            m.n_terms()
        );
        let one = Chain::from_indices(2, cx.count(2), [5]);
        let d = DisorderSample::from_error_chain(&m, &one).unwrap();
        assert_eq!(d.signs().iter().filter(|&&e| e == -1).count(), 1);
        assert_eq!(d.eta(5), -1);
        assert!(matches!(
            DisorderSample::from_error_chain(&m, &cx.empty_chain(1)),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn energy_extremes() {
        for kind in ModelKind::ALL {
            let m = SpinModel::build(kind, torus(kind.dim(), 2)).unwrap();
            let up = vec![1i8; m.n_spins()];
            let d = DisorderSample::uniform(m.n_terms());
            assert_eq!(m.energy(&up, &d).unwrap(), -(m.n_terms() as f64));
            let neg = DisorderSample::sample(&m, 1.0, 0).unwrap();
            assert_eq!(m.energy(&up, &neg).unwrap(), m.n_terms() as f64);
        }
    }

    #[test]
    fn local_field_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in ModelKind::ALL {
            let m = SpinModel::build(kind, torus(kind.dim(), 3))
                .unwrap()
                .with_anisotropy(kind.default_temporal_terms(), 0.7)
                .unwrap();
            let d = DisorderSample::sample(&m, 0.3, 9).unwrap();
            for _ in 0..20 {
                let mut spins = random_spins(m.n_spins(), &mut rng);
                let s = rng.gen_range(0..m.n_spins());
                let before = m.energy(&spins, &d).unwrap();
                let de = m.delta_energy(&spins, &d, s);
                spins[s] = -spins[s];
                let after = m.energy(&spins, &d).unwrap();
                assert!((after - before - de).abs() < 1e-9, "{kind}");
            }
        }
    }

    #[test]
    fn gauge_generators_preserve_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for kind in [ModelKind::Rpgm3, ModelKind::Rpgm4, ModelKind::Rcgm4] {
            let m = SpinModel::build(kind, torus(kind.dim(), 2)).unwrap();
            let gens = m.gauge_generators().unwrap();
            let d = DisorderSample::sample(&m, 0.4, 1).unwrap();
            for g in &gens {
                // every term holds an even number of flipped spins
                for t in 0..m.n_terms() {
                    let overlap = m.term_members(t).iter().filter(|s| g.contains(s)).count();
                    assert_eq!(overlap % 2, 0);
                }
            }
            for _ in 0..50 {
                let mut spins = random_spins(m.n_spins(), &mut rng);
                let e0 = m.energy(&spins, &d).unwrap();
                let g = &gens[rng.gen_range(0..gens.len())];
                for &s in g {
                    spins[s as usize] *= -1;
                }
                assert_eq!(m.energy(&spins, &d).unwrap(), e0);
            }
        }
    }

    #[test]
    fn generator_shapes() {
        let m = SpinModel::build(ModelKind::Rpgm3, torus(3, 3)).unwrap();
        let gens = m.gauge_generators().unwrap();
        assert!(gens.iter().all(|g| g.len() == 6));
        // product of all vertex generators flips each link twice
        let mut count = vec![0usize; m.n_spins()];
        for g in &gens {
            for &s in g {
                count[s as usize] += 1;
            }
        }
        assert!(count.iter().all(|&c| c % 2 == 0));

        let m = SpinModel::build(ModelKind::Rcgm4, torus(4, 2)).unwrap();
        let gens = m.gauge_generators().unwrap();
        assert!(gens.iter().all(|g| g.len() == 6));
        // each cube containing the link holds exactly two of its plaquettes
        let cx = m.complex();
        for (link, g) in gens.iter().enumerate() {
            for cube in cx.coface_indices(1, link).into_iter().flat_map(|p| cx.coface_indices(2, p)) {
                let held = cx
                    .face_indices(3, cube)
                    .iter()
                    .filter(|p| g.contains(&(**p as u32)))
                    .count();
                assert_eq!(held, 2);
            }
        }
        let rbim = SpinModel::build(ModelKind::Rbim3, torus(3, 2)).unwrap();
        assert!(matches!(rbim.gauge_generators(), Err(Error::NoGaugeSymmetry(_))));
    }

    #[test]
    fn descriptor_round_trip() {
        let m = SpinModel::build(ModelKind::Rcgm4, torus(4, 2))
            .unwrap()
            .with_anisotropy(TemporalTerms::TransverseToTime, 0.5)
            .unwrap();
        let json = serde_json::to_string(&m.descriptor()).unwrap();
        let back: ModelDescriptor = serde_json::from_str(&json).unwrap();
        let m2 = SpinModel::from_descriptor(&back).unwrap();
        assert_eq!(m.incidence_hash(), m2.incidence_hash());
        assert_eq!(m.term_classes(), m2.term_classes());
    }
}
