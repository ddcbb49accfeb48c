//! The 3D toric code, its noise, and spacetime syndrome histories.
//!
//! Qubits live on the links of an L×L×L torus. Z errors form a primal
//! 1-chain whose boundary (on vertices) is the star syndrome. X errors are
//! read on the dual lattice as a 2-chain of dual plaquettes; its boundary is
//! a 1-chain of dual links, one per violated plaquette stabilizer.
//!
//! Repeated noisy measurement adds a time axis (axis 3). Each sector gets its
//! own 4D complex: the Z sector is built on the primal spatial lattice and the
//! X sector on the dual one, so in both cases qubit faults are spacelike
//! cells of the sector's rank and measurement faults are the timelike cells
//! of the same rank.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, GF2Matrix};
use crate::homology::{ClassLabel, HomologyBasis};
use crate::lattice::{BoundaryCondition, CellComplex, CellId, Chain};
use crate::models::{DisorderSample, ModelKind, SpinModel, TemporalTerms};

pub const TIME_AXIS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    X,
    Z,
}

impl Sector {
    /// Rank of the error chain on the sector's spatial complex.
    pub fn qubit_rank(self) -> usize {
        match self {
            Sector::Z => 1,
            Sector::X => 2,
        }
    }
}

impl std::str::FromStr for Sector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Sector::X),
            "Z" | "z" => Ok(Sector::Z),
            _ => Err(Error::Parse(format!("unknown sector {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeBoundary {
    /// `rounds` noisy rounds followed by one perfect round.
    #[default]
    Open,
    /// `rounds` noisy rounds on a time circle.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p: f64,
    pub q: f64,
    pub rounds: usize,
    pub sector: Sector,
    #[serde(default)]
    pub time: TimeBoundary,
}

impl NoiseParams {
    /// Symmetric noise, q = p.
    pub fn new(p: f64, rounds: usize, sector: Sector) -> Result<Self> {
        Self {
            p,
            q: p,
            rounds,
            sector,
            time: TimeBoundary::Open,
        }
        .validated()
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        self.q = q;
        self.validated()
    }

    pub fn with_time(mut self, time: TimeBoundary) -> Result<Self> {
        self.time = time;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        for (name, r) in [("p", self.p), ("q", self.q)] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::Domain(format!("{name} = {r} outside [0, 1)")));
            }
        }
        if self.rounds == 0 {
            return Err(Error::Domain("at least one round is required".into()));
        }
        if self.time == TimeBoundary::Periodic && self.rounds < 2 {
            return Err(Error::DegenerateLattice(
                "periodic time needs at least two rounds".into(),
            ));
        }
        Ok(self)
    }
}

/// Independent X and Z parts of a Pauli error.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliError {
    /// X errors as a 2-chain of dual plaquettes.
    pub x: Chain,
    /// Z errors as a 1-chain of primal links.
    pub z: Chain,
}

#[derive(Clone, Debug)]
pub struct ToricCode3D {
    l: usize,
    primal: Arc<CellComplex>,
    dual: Arc<CellComplex>,
    strings: HomologyBasis,
    /// Dual 2-cycles; membrane i crosses string i once.
    membranes: Vec<Chain>,
}

impl ToricCode3D {
    pub fn new(l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::DegenerateLattice(format!(
                "toric code needs L >= 2, got {l}"
            )));
        }
        let primal = Arc::new(CellComplex::torus(3, l)?);
        let dual = Arc::new(primal.dual_complex());
        let strings = HomologyBasis::new(&primal, 1)?;
        let dual_basis = HomologyBasis::new(&dual, 2)?;
        let membranes = (0..3)
            .map(|i| {
                let sector = 0b111 & !(1u8 << i);
                let pos = dual_basis
                    .sectors()
                    .iter()
                    .position(|&s| s == sector)
                    .expect("every coordinate plane is a sector");
                dual_basis.representatives()[pos].clone()
            })
            .collect();
        Ok(Self {
            l,
            primal,
            dual,
            strings,
            membranes,
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n_qubits(&self) -> usize {
        self.primal.count(1)
    }

    pub fn primal(&self) -> &Arc<CellComplex> {
        &self.primal
    }

    pub fn dual(&self) -> &Arc<CellComplex> {
        &self.dual
    }

    /// Complex on which the sector's errors are chains.
    pub fn sector_complex(&self, sector: Sector) -> &Arc<CellComplex> {
        match sector {
            Sector::Z => &self.primal,
            Sector::X => &self.dual,
        }
    }

    /// Qubits acted on by the star operator of vertex `v`.
    pub fn vertex_stabilizer(&self, v: usize) -> Vec<usize> {
        self.primal.coface_indices(0, v)
    }

    /// Qubits around plaquette `p`.
    pub fn plaquette_stabilizer(&self, p: usize) -> Vec<usize> {
        self.primal.face_indices(2, p)
    }

    pub fn vertex_stabilizers(&self) -> Vec<Vec<usize>> {
        (0..self.primal.count(0)).map(|v| self.vertex_stabilizer(v)).collect()
    }

    pub fn plaquette_stabilizers(&self) -> Vec<Vec<usize>> {
        (0..self.primal.count(2)).map(|p| self.plaquette_stabilizer(p)).collect()
    }

    /// Stabilizer supports as rows of a qubit matrix.
    pub fn stabilizer_matrix(&self, sector_checks: Sector) -> GF2Matrix {
        let n = self.n_qubits();
        let rows = match sector_checks {
            // vertex operators detect Z errors
            Sector::Z => self.vertex_stabilizers(),
            Sector::X => self.plaquette_stabilizers(),
        }
        .into_iter()
        .map(|s| BitVec::from_indices(n, s))
        .collect();
        GF2Matrix::from_rows(n, rows).expect("rows have qubit length")
    }

    /// Logical Z strings as primal 1-cycles.
    pub fn logical_strings(&self) -> &[Chain] {
        self.strings.representatives()
    }

    /// Logical X membranes as dual 2-cycles.
    pub fn logical_membranes(&self) -> &[Chain] {
        &self.membranes
    }

    /// Qubits of a sector chain, as a primal link chain.
    pub fn qubits_of(&self, error: &Chain, sector: Sector) -> Result<Chain> {
        self.check_error(error, sector)?;
        match sector {
            Sector::Z => Ok(error.clone()),
            Sector::X => self.dual.dual_chain(error),
        }
    }

    /// Sector chain acting on the given primal qubit links.
    pub fn sector_chain(&self, qubits: &Chain, sector: Sector) -> Result<Chain> {
        self.check_error(qubits, Sector::Z)?;
        match sector {
            Sector::Z => Ok(qubits.clone()),
            Sector::X => self.primal.dual_chain(qubits),
        }
    }

    fn check_error(&self, error: &Chain, sector: Sector) -> Result<()> {
        if error.rank() != sector.qubit_rank() || error.len() != self.n_qubits() {
            return Err(Error::Rank(format!(
                "{sector:?} errors are rank-{} chains over {} qubits, got rank {} of length {}",
                sector.qubit_rank(),
                self.n_qubits(),
                error.rank(),
                error.len()
            )));
        }
        Ok(())
    }

    pub fn static_syndrome(&self, error: &Chain, sector: Sector) -> Result<Chain> {
        self.check_error(error, sector)?;
        self.sector_complex(sector).boundary(error)
    }

    /// Sector chains whose intersection parities label the logical class:
    /// the conjugate logicals, written in the sector's own complex.
    pub fn class_detectors(&self, sector: Sector) -> Vec<Chain> {
        match sector {
            Sector::Z => self
                .membranes
                .iter()
                .map(|m| self.dual.dual_chain(m).expect("periodic"))
                .collect(),
            Sector::X => self
                .strings
                .representatives()
                .iter()
                .map(|s| self.primal.dual_chain(s).expect("periodic"))
                .collect(),
        }
    }

    /// Intersection parities with [`Self::class_detectors`]. For errors with
    /// equal syndromes the XOR of labels is the class of their sum.
    pub fn relative_label(&self, error: &Chain, sector: Sector) -> Result<ClassLabel> {
        self.check_error(error, sector)?;
        Ok(self
            .class_detectors(sector)
            .iter()
            .enumerate()
            .fold(0, |acc, (i, d)| acc | (error.pairing(d) as u32) << i))
    }

    /// Logical class of an error with empty syndrome: bit i set when it
    /// anticommutes with the conjugate logical of qubit i.
    pub fn static_class(&self, error: &Chain, sector: Sector) -> Result<ClassLabel> {
        if !self.static_syndrome(error, sector)?.is_empty() {
            return Err(Error::Precondition("error has a nonzero syndrome".into()));
        }
        self.relative_label(error, sector)
    }

    /// Logical operator of a class, as a sector chain.
    pub fn logical_of(&self, label: ClassLabel, sector: Sector) -> Chain {
        let reps: &[Chain] = match sector {
            Sector::Z => self.strings.representatives(),
            Sector::X => &self.membranes,
        };
        let mut out = Chain::zero(sector.qubit_rank(), self.n_qubits());
        for (i, r) in reps.iter().enumerate() {
            if label >> i & 1 == 1 {
                out.add_assign(r);
            }
        }
        out
    }

    /// Any sector chain with the given static syndrome.
    pub fn realize_syndrome(&self, syndrome: &Chain, sector: Sector) -> Result<Chain> {
        let cx = self.sector_complex(sector);
        let k = sector.qubit_rank();
        let m = cx.boundary_matrix(k)?;
        let x = m.solve(syndrome.bits())?.ok_or(Error::InfeasibleSyndrome)?;
        Ok(Chain::from_bits(k, x))
    }

    /// I.i.d. flips of every qubit with probability `p` in one sector.
    pub fn sample_sector_error(&self, sector: Sector, p: f64, seed: u64) -> Result<Chain> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n_qubits();
        Ok(Chain::from_indices(
            sector.qubit_rank(),
            n,
            (0..n).filter(|_| rng.gen_bool(p)).collect::<Vec<_>>(),
        ))
    }

    /// Depolarizing noise: X, Y, Z each with probability p/3; Y counts in
    /// both sectors.
    pub fn sample_depolarizing(&self, p: f64, seed: u64) -> Result<PauliError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n_qubits();
        let mut xq = Chain::zero(1, n);
        let mut z = Chain::zero(1, n);
        for i in 0..n {
            if rng.gen_bool(p) {
                match rng.gen_range(0..3) {
                    0 => xq.set(i, true),
                    1 => {
                        xq.set(i, true);
                        z.set(i, true)
                    }
                    _ => z.set(i, true),
                }
            }
        }
        Ok(PauliError {
            x: self.primal.dual_chain(&xq)?,
            z,
        })
    }

    /// Spin model whose partition functions weigh the error classes of one
    /// sector with perfect measurements: RPGM3 on the dual lattice for Z
    /// errors, RBIM3 on the primal lattice for X errors.
    pub fn static_model(&self, sector: Sector) -> Result<SpinModel> {
        match sector {
            Sector::Z => SpinModel::build(ModelKind::Rpgm3, self.dual.clone()),
            Sector::X => SpinModel::build(ModelKind::Rbim3, self.primal.clone()),
        }
    }

    /// Disorder of [`Self::static_model`] induced by an error chain.
    pub fn static_disorder(&self, model: &SpinModel, error: &Chain, sector: Sector) -> Result<DisorderSample> {
        self.check_error(error, sector)?;
        let terms = self.sector_complex(sector).dual_chain(error)?;
        DisorderSample::from_error_chain(model, &terms)
    }

    pub fn spacetime(&self, noise: &NoiseParams) -> Result<Spacetime> {
        Spacetime::new(self, noise)
    }
}

/// The 4D complex of one sector's syndrome history.
#[derive(Clone, Debug)]
pub struct Spacetime {
    sector: Sector,
    rounds: usize,
    time: TimeBoundary,
    spatial: Arc<CellComplex>,
    complex: Arc<CellComplex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeErrorChain {
    pub sector: Sector,
    /// Qubit faults on spacelike cells, measurement faults on timelike cells.
    pub chain: Chain,
}

/// Measured outcomes and detection events of one syndrome history.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeHistory {
    pub sector: Sector,
    /// Measured syndrome of each noisy round, placed on the timelike cells
    /// leaving that round's layer.
    pub measured: Chain,
    /// Changes of the measured value between consecutive rounds; equal to
    /// the boundary of the error chain.
    pub events: Chain,
    /// Syndrome of the accumulated qubit error after the last round.
    pub final_syndrome: Chain,
}

impl Spacetime {
    fn new(code: &ToricCode3D, noise: &NoiseParams) -> Result<Self> {
        let noise = noise.validated()?;
        let spatial = code.sector_complex(noise.sector).clone();
        let l = code.l();
        let (t_len, t_bc) = match noise.time {
            TimeBoundary::Open => (noise.rounds + 1, BoundaryCondition::Open),
            TimeBoundary::Periodic => (noise.rounds, BoundaryCondition::Periodic),
        };
        let mut cx = CellComplex::new(
            4,
            &[l, l, l, t_len],
            &[
                BoundaryCondition::Periodic,
                BoundaryCondition::Periodic,
                BoundaryCondition::Periodic,
                t_bc,
            ],
        )?;
        if spatial.side() != cx.side() {
            cx = cx.dual_complex();
        }
        Ok(Self {
            sector: noise.sector,
            rounds: noise.rounds,
            time: noise.time,
            spatial,
            complex: Arc::new(cx),
        })
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn time_boundary(&self) -> TimeBoundary {
        self.time
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn spatial(&self) -> &Arc<CellComplex> {
        &self.spatial
    }

    pub fn qubit_rank(&self) -> usize {
        self.sector.qubit_rank()
    }

    pub fn n_layers(&self) -> usize {
        self.complex.lengths()[TIME_AXIS]
    }

    /// Layer on which the final syndrome appears.
    pub fn closing_layer(&self) -> usize {
        match self.time {
            TimeBoundary::Open => self.rounds,
            TimeBoundary::Periodic => 0,
        }
    }

    /// Index of a spatial k-cell copied to `layer`.
    pub fn spacelike(&self, k: usize, spatial_index: usize, layer: usize) -> usize {
        let mut c = self.spatial.cell(k, spatial_index);
        c.coord[TIME_AXIS] = layer as u32;
        self.complex.index(&c)
    }

    /// Index of the (k+1)-cell sweeping a spatial k-cell from `layer` to the next.
    pub fn timelike(&self, k: usize, spatial_index: usize, layer: usize) -> usize {
        let mut c = self.spatial.cell(k, spatial_index);
        c.coord[TIME_AXIS] = layer as u32;
        c.axes |= 1 << TIME_AXIS;
        self.complex.index(&c)
    }

    pub fn is_timelike(cell: &CellId) -> bool {
        cell.has_axis(TIME_AXIS)
    }

    /// Place a spatial chain on one layer.
    pub fn lift(&self, c: &Chain, layer: usize) -> Chain {
        let mut out = self.complex.empty_chain(c.rank());
        for i in c.indices() {
            out.toggle(self.spacelike(c.rank(), i, layer));
        }
        out
    }

    /// Spatial content of one layer of a spacetime chain.
    pub fn slice(&self, c: &Chain, layer: usize) -> Chain {
        let k = c.rank();
        let mut out = self.spatial.empty_chain(k);
        for i in 0..self.spatial.count(k) {
            if c.contains(self.spacelike(k, i, layer)) {
                out.set(i, true);
            }
        }
        out
    }

    /// Spatial cells under the timelike part of a chain leaving `layer`.
    pub fn time_slice(&self, c: &Chain, layer: usize) -> Chain {
        let k = c.rank() - 1;
        let mut out = self.spatial.empty_chain(k);
        for i in 0..self.spatial.count(k) {
            if c.contains(self.timelike(k, i, layer)) {
                out.set(i, true);
            }
        }
        out
    }

    /// Samples qubit faults (rate p) in every noisy round and measurement
    /// faults (rate q) on every check of every noisy round.
    pub fn sample_error(&self, noise: &NoiseParams, seed: u64) -> Result<SpacetimeErrorChain> {
        let noise = noise.validated()?;
        if noise.sector != self.sector || noise.rounds != self.rounds || noise.time != self.time {
            return Err(Error::Precondition("noise does not describe this spacetime".into()));
        }
        let k = self.qubit_rank();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chain = self.complex.empty_chain(k);
        for r in 0..self.rounds {
            for i in 0..self.spatial.count(k) {
                if rng.gen_bool(noise.p) {
                    chain.toggle(self.spacelike(k, i, r));
                }
            }
            for c in 0..self.spatial.count(k - 1) {
                if rng.gen_bool(noise.q) {
                    chain.toggle(self.timelike(k - 1, c, r));
                }
            }
        }
        Ok(SpacetimeErrorChain {
            sector: self.sector,
            chain,
        })
    }

    fn check(&self, e: &SpacetimeErrorChain) -> Result<()> {
        if e.sector != self.sector
            || e.chain.rank() != self.qubit_rank()
            || e.chain.len() != self.complex.count(self.qubit_rank())
        {
            return Err(Error::Rank("error chain does not belong to this spacetime".into()));
        }
        Ok(())
    }

    /// Qubit faults of round `r`.
    pub fn qubit_faults(&self, e: &SpacetimeErrorChain, r: usize) -> Chain {
        self.slice(&e.chain, r)
    }

    /// Measurement faults of round `r`.
    pub fn measurement_faults(&self, e: &SpacetimeErrorChain, r: usize) -> Chain {
        self.time_slice(&e.chain, r)
    }

    /// Spacelike and timelike parts; they partition the chain.
    pub fn split(&self, c: &Chain) -> (Chain, Chain) {
        let mut space = Chain::zero(c.rank(), c.len());
        let mut time = Chain::zero(c.rank(), c.len());
        for i in c.indices() {
            if Self::is_timelike(&self.complex.cell(c.rank(), i)) {
                time.set(i, true);
            } else {
                space.set(i, true);
            }
        }
        (space, time)
    }

    /// Runs the measurement rounds and records what the checks report.
    pub fn detection_events(&self, e: &SpacetimeErrorChain) -> Result<SyndromeHistory> {
        self.check(e)?;
        let k = self.qubit_rank();
        let mut accumulated = self.spatial.empty_chain(k);
        let mut measured = self.complex.empty_chain(k);
        let mut events = self.complex.empty_chain(k - 1);
        let mut previous = self.spatial.empty_chain(k - 1);
        let mut rounds = Vec::with_capacity(self.rounds);
        for r in 0..self.rounds {
            accumulated.add_assign(&self.qubit_faults(e, r));
            let mut m = self.spatial.boundary(&accumulated)?;
            m.add_assign(&self.measurement_faults(e, r));
            for c in m.indices() {
                measured.toggle(self.timelike(k - 1, c, r));
            }
            rounds.push(m);
        }
        let final_syndrome = self.spatial.boundary(&accumulated)?;
        for (r, m) in rounds.iter().enumerate() {
            let change = m + &previous;
            events.add_assign(&self.lift(&change, r));
            previous = m.clone();
        }
        match self.time {
            TimeBoundary::Open => {
                // the perfect final round
                let change = &final_syndrome + &previous;
                events.add_assign(&self.lift(&change, self.rounds));
            }
            TimeBoundary::Periodic => {
                // round 0 compares against round T-1 seen in the frame of the
                // accumulated error, which wraps around the time circle
                let wrap = &previous + &final_syndrome;
                events.add_assign(&self.lift(&wrap, 0));
            }
        }
        // Each reported syndrome must itself be a boundary; where it is not
        // (only possible for X-sector plaquette checks) the violation sits on
        // the timelike cell leaving that round.
        if k >= 2 {
            for (r, m) in rounds.iter().enumerate() {
                for v in self.spatial.boundary(m)?.indices() {
                    events.toggle(self.timelike(k - 2, v, r));
                }
            }
        }
        Ok(SyndromeHistory {
            sector: self.sector,
            measured,
            events,
            final_syndrome,
        })
    }

    /// Chain on the closing layer applying a spatial correction after the
    /// last round.
    pub fn final_correction(&self, spatial: &Chain) -> Chain {
        self.lift(spatial, self.closing_layer())
    }

    /// A recovery built from the detection events alone: any chain with the
    /// event boundary, plus the measured record.
    pub fn recovery_from_events(&self, h: &SyndromeHistory) -> Result<Chain> {
        let k = self.qubit_rank();
        let m = self.complex.boundary_matrix(k)?;
        let x = m.solve(h.events.bits())?.ok_or(Error::InfeasibleSyndrome)?;
        let mut r = Chain::from_bits(k, x);
        r.add_assign(&h.measured);
        Ok(r)
    }

    fn class_basis(&self) -> Result<HomologyBasis> {
        HomologyBasis::along_axes(&self.complex, self.qubit_rank(), &[0, 1, 2])
    }

    /// Logical class of a spacetime cycle. Bit i is the logical qubit i: a
    /// Z-sector cycle winding axis i, or an X-sector membrane normal to axis i.
    pub fn classify(&self, z: &Chain) -> Result<ClassLabel> {
        let basis = self.class_basis()?;
        let raw = basis.classify(&self.complex, z)?;
        let mut out = 0;
        for (bit, &s) in basis.sectors().iter().enumerate() {
            if raw >> bit & 1 == 1 {
                let axis = match self.sector {
                    Sector::Z => s.trailing_zeros(),
                    Sector::X => (0b111 & !s).trailing_zeros(),
                };
                out |= 1 << axis;
            }
        }
        Ok(out)
    }

    /// Class of ℰ + 𝒮 + ℛ; zero means the recovery succeeded.
    pub fn logical_class(&self, e: &SpacetimeErrorChain, h: &SyndromeHistory, r: &Chain) -> Result<ClassLabel> {
        self.check(e)?;
        let mut total = e.chain.clone();
        total.add_assign(&h.measured);
        if r.rank() != total.rank() || r.len() != total.len() {
            return Err(Error::Rank("recovery does not belong to this spacetime".into()));
        }
        total.add_assign(r);
        self.classify(&total)
    }

    /// Spatial logical operator of a class, on the given layer.
    pub fn logical_on_layer(&self, code: &ToricCode3D, label: ClassLabel, layer: usize) -> Chain {
        self.lift(&code.logical_of(label, self.sector), layer)
    }

    /// Spin model of the history: RCGM4 for Z errors, RPGM4 for X errors,
    /// with K/J = `temporal_coupling` on the measurement terms. On a time
    /// circle it is built on the dual 4D lattice; with open time it is the
    /// same hypergraph written with cofaces on this complex.
    pub fn model(&self, temporal_coupling: f64) -> Result<SpinModel> {
        let kind = match self.sector {
            Sector::Z => ModelKind::Rcgm4,
            Sector::X => ModelKind::Rpgm4,
        };
        match self.time {
            TimeBoundary::Periodic => SpinModel::build(kind, Arc::new(self.complex.dual_complex()))?
                .with_anisotropy(TemporalTerms::TransverseToTime, temporal_coupling),
            TimeBoundary::Open => SpinModel::cofacial(kind, self.complex.clone(), self.qubit_rank() + 1)?
                .with_anisotropy(TemporalTerms::ContainingTime, temporal_coupling),
        }
    }

    /// Disorder of [`Self::model`] for an error history.
    pub fn disorder(&self, model: &SpinModel, e: &SpacetimeErrorChain) -> Result<DisorderSample> {
        self.check(e)?;
        match self.time {
            TimeBoundary::Periodic => {
                DisorderSample::from_error_chain(model, &self.complex.dual_chain(&e.chain)?)
            }
            TimeBoundary::Open => DisorderSample::from_error_chain(model, &e.chain),
        }
    }
}

/// Coupling ratio K/J on the Nishimori line for rates p and q.
pub fn nishimori_anisotropy(p: f64, q: f64) -> Result<f64> {
    Ok(crate::models::nishimori_beta(q)? / crate::models::nishimori_beta(p)?)
}
