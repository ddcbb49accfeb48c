//! Single-flip Metropolis dynamics, replica exchange, and measurements.
//!
//! A chain keeps, next to its spins, the satisfaction s_t = eta_t u_t of every
//! term. Flipping a spin negates the satisfaction of its terms, so the energy
//! change only needs the local sums of s_t split by coupling class, and the
//! acceptance probabilities come from a table indexed by those sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CellComplex, CellId, Chain, MAX_DIM};
use crate::models::{DisorderSample, DisorderSource, Incidence, SpinModel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    /// Spins in index order.
    #[default]
    Sequential,
    /// N uniformly random spins per sweep.
    RandomSite,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// All spins +1.
    #[default]
    Cold,
    /// Independent uniform spins.
    Hot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub thermalization: usize,
    pub measurements: usize,
    pub interval: usize,
    /// Inverse temperatures in units of the spatial coupling; with more than
    /// one entry and `tempering` set, replicas exchange configurations.
    pub betas: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    #[serde(default)]
    pub order: SweepOrder,
    #[serde(default)]
    pub tempering: bool,
    #[serde(default)]
    pub init: InitialState,
    /// Rectangle sizes (a, b) for Wilson loops.
    #[serde(default)]
    pub loops: Vec<(usize, usize)>,
    /// Box sizes (a, b, c) for Wilson surfaces.
    #[serde(default)]
    pub surfaces: Vec<(usize, usize, usize)>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            thermalization: 1000,
            measurements: 10_000,
            interval: 10,
            betas: vec![0.5],
            seed: 0,
            samples: 100,
            order: SweepOrder::Sequential,
            tempering: false,
            init: InitialState::Cold,
            loops: Vec::new(),
            surfaces: Vec::new(),
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thermalization == 0 && self.measurements == 0 {
            return Err(Error::Config("no sweeps requested".into()));
        }
        if self.measurements == 0 || self.interval == 0 || self.samples == 0 {
            return Err(Error::Config(
                "measurements, interval and samples must be at least 1".into(),
            ));
        }
        if self.betas.is_empty() {
            return Err(Error::Config("temperature ladder is empty".into()));
        }
        if self.betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::Config("inverse temperatures must be finite and non-negative".into()));
        }
        if self.betas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("temperature ladder must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn records_per_chain(&self) -> usize {
        self.measurements / self.interval
    }
}

/// A spin configuration with cached term satisfactions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub spins: Vec<i8>,
    sat: Vec<i8>,
    /// Sums of satisfactions over spatial and temporal terms.
    sums: [i64; 2],
}

impl ChainState {
    pub fn new(model: &SpinModel, disorder: &DisorderSample, spins: Vec<i8>) -> Result<Self> {
        if spins.len() != model.n_spins() || disorder.len() != model.n_terms() {
            return Err(Error::DimensionMismatch("state does not fit the model".into()));
        }
        let mut sat = Vec::with_capacity(model.n_terms());
        let mut sums = [0i64; 2];
        for t in 0..model.n_terms() {
            let s = disorder.eta(t) * model.term_value(&spins, t);
            sums[model.term_class(t) as usize] += s as i64;
            sat.push(s);
        }
        Ok(Self { spins, sat, sums })
    }

    pub fn cold(model: &SpinModel, disorder: &DisorderSample) -> Result<Self> {
        Self::new(model, disorder, vec![1; model.n_spins()])
    }

    pub fn hot(model: &SpinModel, disorder: &DisorderSample, rng: &mut impl Rng) -> Result<Self> {
        let spins = (0..model.n_spins())
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect();
        Self::new(model, disorder, spins)
    }

    /// Energy with spatial J = 1 and temporal coupling K.
    pub fn energy(&self, temporal_coupling: f64) -> f64 {
        -(self.sums[0] as f64 + temporal_coupling * self.sums[1] as f64)
    }

    /// Sum of eta_t u_t over spatial and temporal terms.
    pub fn overlap_sums(&self) -> [i64; 2] {
        self.sums
    }

    /// Flips a set of spins, keeping the caches consistent.
    pub fn flip_set(&mut self, model: &SpinModel, set: &[u32]) {
        for &s in set {
            self.flip(model, s as usize);
        }
    }

    #[inline]
    fn flip(&mut self, model: &SpinModel, s: usize) {
        self.spins[s] = -self.spins[s];
        for &t in model.spin_terms(s) {
            let t = t as usize;
            self.sums[model.term_class(t) as usize] -= 2 * self.sat[t] as i64;
            self.sat[t] = -self.sat[t];
        }
    }
}

/// Metropolis kernel at one inverse temperature.
#[derive(Clone, Debug)]
pub struct Metropolis<'m> {
    model: &'m SpinModel,
    beta: f64,
    max_degree: i32,
    isotropic: bool,
    /// acceptance[(h0 + D) * (2D + 1) + (h1 + D)] for local sums h0, h1
    acceptance: Vec<f64>,
}

impl<'m> Metropolis<'m> {
    pub fn new(model: &'m SpinModel, beta: f64) -> Self {
        let d = model.max_degree() as i32;
        let w = (2 * d + 1) as usize;
        let k = model.temporal_coupling();
        let mut acceptance = vec![1.0; w * w];
        for h0 in -d..=d {
            for h1 in -d..=d {
                let de = 2.0 * (h0 as f64 + k * h1 as f64);
                acceptance[(h0 + d) as usize * w + (h1 + d) as usize] = (-beta * de).exp().min(1.0);
            }
        }
        Self {
            model,
            beta,
            max_degree: d,
            isotropic: model.term_classes().iter().all(|&c| c == 0),
            acceptance,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    fn attempt(&self, state: &mut ChainState, s: usize, rng: &mut impl Rng) -> bool {
        let model = self.model;
        let terms = model.spin_terms(s);
        let mut h = [0i32; 2];
        if self.isotropic {
            h[0] = terms.iter().map(|&t| state.sat[t as usize] as i32).sum();
        } else {
            for &t in terms {
                let t = t as usize;
                h[model.term_class(t) as usize] += state.sat[t] as i32;
            }
        }
        let d = self.max_degree;
        let a = self.acceptance[(h[0] + d) as usize * (2 * d + 1) as usize + (h[1] + d) as usize];
        if a >= 1.0 || rng.gen::<f64>() < a {
            // every term of s changes sign, so each class sum drops by 2h
            state.spins[s] = -state.spins[s];
            for &t in terms {
                state.sat[t as usize] = -state.sat[t as usize];
            }
            state.sums[0] -= 2 * h[0] as i64;
            state.sums[1] -= 2 * h[1] as i64;
            true
        } else {
            false
        }
    }

    /// One sweep of N proposals; returns the number accepted.
    pub fn sweep(&self, state: &mut ChainState, order: SweepOrder, rng: &mut impl Rng) -> usize {
        let n = self.model.n_spins();
        let mut accepted = 0;
        match order {
            SweepOrder::Sequential => {
                for s in 0..n {
                    accepted += self.attempt(state, s, rng) as usize;
                }
            }
            SweepOrder::RandomSite => {
                for _ in 0..n {
                    let s = rng.gen_range(0..n);
                    accepted += self.attempt(state, s, rng) as usize;
                }
            }
        }
        accepted
    }
}

/// Proposes exchanges between neighbouring rungs of a ladder; `states[i]`
/// is at `betas[i]`. Returns, per adjacent pair, whether it swapped.
pub fn parallel_tempering_step(
    states: &mut [ChainState],
    betas: &[f64],
    temporal_coupling: f64,
    rng: &mut impl Rng,
) -> Result<Vec<bool>> {
    if states.len() != betas.len() || states.len() < 2 {
        return Err(Error::Precondition(
            "tempering needs one state per rung and at least two rungs".into(),
        ));
    }
    if states.windows(2).any(|w| w[0].sat.len() != w[1].sat.len()) {
        return Err(Error::DimensionMismatch("replicas belong to different models".into()));
    }
    let mut swapped = Vec::with_capacity(states.len() - 1);
    for i in 0..states.len() - 1 {
        let de = states[i].energy(temporal_coupling) - states[i + 1].energy(temporal_coupling);
        let x = (betas[i] - betas[i + 1]) * de;
        let accept = x >= 0.0 || rng.gen::<f64>() < x.exp();
        if accept {
            states.swap(i, i + 1);
        }
        swapped.push(accept);
    }
    Ok(swapped)
}

/// Spin sets of a Wilson loop (boundary of an a×b rectangle) at every anchor
/// and in every coordinate plane that fits.
pub fn wilson_loop_sets(model: &SpinModel, a: usize, b: usize) -> Result<Vec<Vec<u32>>> {
    closed_sets(model, 1, &[a, b])
}

/// Spin sets of a Wilson surface (boundary of an a×b×c box).
pub fn wilson_surface_sets(model: &SpinModel, a: usize, b: usize, c: usize) -> Result<Vec<Vec<u32>>> {
    closed_sets(model, 2, &[a, b, c])
}

fn closed_sets(model: &SpinModel, spin_rank: usize, sizes: &[usize]) -> Result<Vec<Vec<u32>>> {
    if model.spin_rank() != spin_rank || model.incidence() != Incidence::Boundary {
        return Err(Error::Unsupported(format!(
            "{}-dimensional Wilson operators need spins on rank-{spin_rank} cells",
            sizes.len() - 1
        )));
    }
    let cx = model.complex();
    let k = sizes.len();
    let mut out = Vec::new();
    for mask in cx.subsets(k).to_vec() {
        let axes: Vec<usize> = (0..cx.dim()).filter(|&a| mask >> a & 1 == 1).collect();
        // every ordered assignment of sizes to the axes
        for perm in permutations(k) {
            let ext: Vec<usize> = perm.iter().map(|&i| sizes[i]).collect();
            if !fits(cx, &axes, &ext) {
                continue;
            }
            for anchor in anchors(cx, &axes, &ext) {
                out.push(box_boundary(cx, &axes, &ext, anchor)?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Domain(format!(
            "no non-winding placement of size {sizes:?} fits the lattice"
        )));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                rec(cur, k, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), k, &mut out);
    out
}

fn fits(cx: &CellComplex, axes: &[usize], ext: &[usize]) -> bool {
    // open axes count vertices, periodic ones must not be wrapped
    axes.iter().zip(ext).all(|(&a, &e)| e >= 1 && e < cx.lengths()[a])
}

fn anchors(cx: &CellComplex, axes: &[usize], ext: &[usize]) -> Vec<[u32; MAX_DIM]> {
    let ranges: Vec<usize> = (0..cx.dim())
        .map(|a| match axes.iter().position(|&x| x == a) {
            Some(i) if !cx.is_periodic(a) => cx.lengths()[a] - ext[i],
            _ => cx.lengths()[a],
        })
        .collect();
    let total: usize = ranges.iter().product();
    (0..total)
        .map(|mut i| {
            let mut c = [0u32; MAX_DIM];
            for (a, &r) in ranges.iter().enumerate() {
                c[a] = (i % r) as u32;
                i /= r;
            }
            c
        })
        .collect()
}

fn box_boundary(cx: &CellComplex, axes: &[usize], ext: &[usize], anchor: [u32; MAX_DIM]) -> Result<Vec<u32>> {
    let k = axes.len();
    let mask = axes.iter().fold(0u8, |m, &a| m | 1 << a);
    let mut cells = Vec::new();
    let n: usize = ext.iter().product();
    for mut i in 0..n {
        let mut c = anchor;
        for (j, &a) in axes.iter().enumerate() {
            let off = (i % ext[j]) as u32;
            i /= ext[j];
            c[a] = (c[a] + off) % cx.lengths()[a] as u32;
        }
        cells.push(CellId::new(c, mask));
    }
    let chain: Chain = cx.chain_from_cells(k, cells);
    Ok(cx.boundary(&chain)?.indices().map(|i| i as u32).collect())
}

/// Product of the spins in a set.
#[inline]
pub fn product(spins: &[i8], set: &[u32]) -> i8 {
    set.iter().fold(1i8, |acc, &s| acc * spins[s as usize])
}

/// Wilson loop of one a×b rectangle in the plane of `axes`, anchored at `anchor`.
pub fn wilson_loop(model: &SpinModel, spins: &[i8], a: usize, b: usize, axes: (usize, usize), anchor: [u32; MAX_DIM]) -> Result<i8> {
    wilson_single(model, spins, 1, &[axes.0, axes.1], &[a, b], anchor)
}

/// Wilson surface of one a×b×c box spanning `axes`, anchored at `anchor`.
pub fn wilson_surface(
    model: &SpinModel,
    spins: &[i8],
    size: (usize, usize, usize),
    axes: (usize, usize, usize),
    anchor: [u32; MAX_DIM],
) -> Result<i8> {
    wilson_single(model, spins, 2, &[axes.0, axes.1, axes.2], &[size.0, size.1, size.2], anchor)
}

fn wilson_single(
    model: &SpinModel,
    spins: &[i8],
    spin_rank: usize,
    axes: &[usize],
    ext: &[usize],
    anchor: [u32; MAX_DIM],
) -> Result<i8> {
    if model.spin_rank() != spin_rank || model.incidence() != Incidence::Boundary {
        return Err(Error::Unsupported("Wilson operator does not match the spin rank".into()));
    }
    let cx = model.complex();
    let mut sorted = axes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != axes.len() || axes.iter().any(|&a| a >= cx.dim()) {
        return Err(Error::Domain(format!("bad axes {axes:?}")));
    }
    if !fits(cx, axes, ext) {
        return Err(Error::Domain(format!("size {ext:?} does not fit without winding")));
    }
    for (&a, &e) in axes.iter().zip(ext) {
        if !cx.is_periodic(a) && anchor[a] as usize + e >= cx.lengths()[a] {
            return Err(Error::Domain("operator leaves the open lattice".into()));
        }
    }
    let set = box_boundary(cx, axes, ext, anchor)?;
    Ok(product(spins, &set))
}

/// Column-labelled measurement records of one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub beta: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ObservableSeries {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn mean(&self, name: &str) -> Option<f64> {
        let c = self.column(name)?;
        if c.is_empty() {
            return None;
        }
        Some(c.iter().sum::<f64>() / c.len() as f64)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn loop_column(a: usize, b: usize) -> String {
    format!("W_{a}x{b}")
}

pub fn surface_column(a: usize, b: usize, c: usize) -> String {
    format!("S_{a}x{b}x{c}")
}

/// What a chain measures.
#[derive(Clone, Debug)]
pub struct Probes {
    columns: Vec<String>,
    magnetization: bool,
    has_temporal: bool,
    class_sizes: [f64; 2],
    /// Per Wilson column, the spin sets averaged into it.
    wilson: Vec<Vec<Vec<u32>>>,
}

impl Probes {
    pub fn new(model: &SpinModel, cfg: &McConfig) -> Result<Self> {
        let mut columns = vec!["energy".to_string(), "overlap".to_string()];
        let n1 = model.term_classes().iter().filter(|&&c| c == 1).count();
        let has_temporal = n1 > 0;
        if has_temporal {
            columns.push("overlap_spatial".into());
            columns.push("overlap_temporal".into());
        }
        let magnetization = model.kind().has_magnetization() && model.incidence() == Incidence::Boundary;
        if magnetization {
            columns.push("m".into());
        }
        let mut wilson = Vec::new();
        for &(a, b) in &cfg.loops {
            wilson.push(wilson_loop_sets(model, a, b)?);
            columns.push(loop_column(a, b));
        }
        for &(a, b, c) in &cfg.surfaces {
            wilson.push(wilson_surface_sets(model, a, b, c)?);
            columns.push(surface_column(a, b, c));
        }
        Ok(Self {
            columns,
            magnetization,
            has_temporal,
            class_sizes: [(model.n_terms() - n1) as f64, n1 as f64],
            wilson,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn measure(&self, model: &SpinModel, state: &ChainState) -> Vec<f64> {
        let n_terms = model.n_terms() as f64;
        let [s0, s1] = state.sums;
        let mut row = vec![
            state.energy(model.temporal_coupling()) / n_terms,
            (s0 + s1) as f64 / n_terms,
        ];
        if self.has_temporal {
            let [n0, n1] = self.class_sizes;
            row.push(s0 as f64 / n0);
            row.push(s1 as f64 / n1);
        }
        if self.magnetization {
            let m: i64 = state.spins.iter().map(|&s| s as i64).sum();
            row.push(m as f64 / state.spins.len() as f64);
        }
        for sets in &self.wilson {
            let total: i64 = sets.iter().map(|set| product(&state.spins, set) as i64).sum();
            row.push(total as f64 / sets.len() as f64);
        }
        row
    }
}

/// Output of one disorder sample: one series per rung.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleRun {
    pub index: usize,
    pub n_flipped: usize,
    pub series: Vec<ObservableSeries>,
    /// Acceptance rate of Metropolis proposals per rung.
    pub acceptance: Vec<f64>,
    /// Swap acceptance per adjacent pair, empty without tempering.
    pub swap_acceptance: Vec<f64>,
}

/// Thermalizes and measures one disorder sample on the configured ladder.
pub fn run_chain(
    model: &SpinModel,
    disorder: &DisorderSample,
    cfg: &McConfig,
    rng: &mut impl Rng,
) -> Result<SampleRun> {
    cfg.validate()?;
    let probes = Probes::new(model, cfg)?;
    run_with_probes(model, disorder, cfg, &probes, rng, 0)
}

/// Like [`run_chain`] but also hands every post-sweep state of rung `rung`
/// to `visit`, for distribution checks.
pub fn run_chain_visiting(
    model: &SpinModel,
    disorder: &DisorderSample,
    cfg: &McConfig,
    rng: &mut impl Rng,
    rung: usize,
    mut visit: impl FnMut(&[i8]),
) -> Result<()> {
    cfg.validate()?;
    let k = model.temporal_coupling();
    let kernels: Vec<Metropolis> = cfg.betas.iter().map(|&b| Metropolis::new(model, b)).collect();
    let mut states = initial_states(model, disorder, cfg, rng)?;
    for sweep in 0..cfg.thermalization + cfg.measurements {
        for (st, ker) in states.iter_mut().zip(&kernels) {
            ker.sweep(st, cfg.order, rng);
        }
        if cfg.tempering && states.len() > 1 {
            parallel_tempering_step(&mut states, &cfg.betas, k, rng)?;
        }
        if sweep >= cfg.thermalization {
            visit(&states[rung].spins);
        }
    }
    Ok(())
}

fn initial_states(model: &SpinModel, disorder: &DisorderSample, cfg: &McConfig, rng: &mut impl Rng) -> Result<Vec<ChainState>> {
    cfg.betas
        .iter()
        .map(|_| match cfg.init {
            InitialState::Cold => ChainState::cold(model, disorder),
            InitialState::Hot => ChainState::hot(model, disorder, rng),
        })
        .collect()
}

fn run_with_probes(
    model: &SpinModel,
    disorder: &DisorderSample,
    cfg: &McConfig,
    probes: &Probes,
    rng: &mut impl Rng,
    index: usize,
) -> Result<SampleRun> {
    let k = model.temporal_coupling();
    let kernels: Vec<Metropolis> = cfg.betas.iter().map(|&b| Metropolis::new(model, b)).collect();
    let mut states = initial_states(model, disorder, cfg, rng)?;
    let rungs = cfg.betas.len();
    let mut accepted = vec![0usize; rungs];
    let mut swaps = vec![0usize; rungs.saturating_sub(1)];
    let mut swap_attempts = 0usize;
    let mut series: Vec<ObservableSeries> = cfg
        .betas
        .iter()
        .map(|&beta| ObservableSeries {
            beta,
            columns: probes.columns().to_vec(),
            rows: Vec::with_capacity(cfg.records_per_chain()),
        })
        .collect();
    for sweep in 0..cfg.thermalization + cfg.measurements {
        for (r, (st, ker)) in states.iter_mut().zip(&kernels).enumerate() {
            accepted[r] += ker.sweep(st, cfg.order, rng);
        }
        if cfg.tempering && rungs > 1 {
            for (c, ok) in swaps.iter_mut().zip(parallel_tempering_step(&mut states, &cfg.betas, k, rng)?) {
                *c += ok as usize;
            }
            swap_attempts += 1;
        }
        if sweep >= cfg.thermalization && (sweep - cfg.thermalization + 1).is_multiple_of(cfg.interval) {
            for (s, st) in series.iter_mut().zip(&states) {
                s.rows.push(probes.measure(model, st));
            }
        }
    }
    let proposals = ((cfg.thermalization + cfg.measurements) * model.n_spins()) as f64;
    Ok(SampleRun {
        index,
        n_flipped: disorder.n_flipped(),
        series,
        acceptance: accepted.iter().map(|&a| a as f64 / proposals).collect(),
        swap_acceptance: swaps
            .iter()
            .map(|&s| if swap_attempts == 0 { 0.0 } else { s as f64 / swap_attempts as f64 })
            .collect(),
    })
}

/// Generator for stream `stream` under a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `cfg.samples` independent disorder samples at error rate `p`
/// (temporal terms at `q`). Sample i draws its disorder from stream 2i and
/// its dynamics from stream 2i+1, so the output does not depend on how the
/// samples are scheduled.
pub fn run_ensemble(model: &SpinModel, p: f64, q: Option<f64>, cfg: &McConfig) -> Result<Vec<SampleRun>> {
    cfg.validate()?;
    let probes = Probes::new(model, cfg)?;
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let stream = 2 * i as u64;
            let mut drng = stream_rng(cfg.seed, stream);
            let disorder = DisorderSample::sample_with(
                model,
                p,
                q,
                &mut drng,
                DisorderSource::Stream { seed: cfg.seed, stream },
            )?;
            let mut rng = stream_rng(cfg.seed, stream + 1);
            run_with_probes(model, &disorder, cfg, &probes, &mut rng, i)
        })
        .collect()
}

/// Mean and standard error over disorder samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderAverage {
    pub observable: String,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Averages per-sample values; the error bar is the sample standard
/// deviation over √n.
pub fn average_values(observable: &str, values: &[f64]) -> Result<DisorderAverage> {
    let n = values.len();
    if n < 2 {
        return Err(Error::DegenerateStatistics(format!(
            "{n} sample(s) cannot give an error bar"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(DisorderAverage {
        observable: observable.to_string(),
        mean,
        stderr: (var / n as f64).sqrt(),
        samples: n,
    })
}

/// Disorder average of the thermal mean of one column.
pub fn disorder_average(series: &[&ObservableSeries], observable: &str) -> Result<DisorderAverage> {
    let values: Vec<f64> = series
        .iter()
        .map(|s| {
            s.mean(observable)
                .ok_or_else(|| Error::Precondition(format!("no column {observable:?}")))
        })
        .collect::<Result<_>>()?;
    average_values(observable, &values)
}

/// Series of rung `rung` from every sample.
pub fn rung_series(runs: &[SampleRun], rung: usize) -> Vec<&ObservableSeries> {
    runs.iter().map(|r| &r.series[rung]).collect()
}

/// 1 - <m^4> / (3 <m^2>^2) of one thermal series.
pub fn binder_cumulant(m: &[f64]) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::DegenerateStatistics("empty magnetization series".into()));
    }
    let n = m.len() as f64;
    let m2 = m.iter().map(|x| x * x).sum::<f64>() / n;
    let m4 = m.iter().map(|x| x.powi(4)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Err(Error::UndefinedCumulant);
    }
    Ok(1.0 - m4 / (3.0 * m2 * m2))
}

/// Thermal moments (<m^2>, <m^4>) of one series' magnetization column.
pub fn thermal_moments(series: &ObservableSeries) -> Result<(f64, f64)> {
    let m = series
        .column("m")
        .ok_or_else(|| Error::Precondition("series has no magnetization".into()))?;
    if m.is_empty() {
        return Err(Error::DegenerateStatistics("empty magnetization series".into()));
    }
    let n = m.len() as f64;
    Ok((
        m.iter().map(|x| x * x).sum::<f64>() / n,
        m.iter().map(|x| x.powi(4)).sum::<f64>() / n,
    ))
}

/// Per-sample Binder cumulants, then their disorder average.
pub fn disorder_binder(series: &[&ObservableSeries]) -> Result<DisorderAverage> {
    let values: Vec<f64> = series
        .iter()
        .map(|s| {
            let m = s
                .column("m")
                .ok_or_else(|| Error::Precondition("series has no magnetization".into()))?;
            binder_cumulant(&m)
        })
        .collect::<Result<_>>()?;
    average_values("binder", &values)
}
