//! Brute-force partition functions and error-class probabilities.
//!
//! Enumeration walks a Gray code over the free spins, so every step flips a
//! single spin and updates the affected terms incrementally. Rather than
//! summing Boltzmann weights directly, each walk fills an integer histogram
//! of (spatial, temporal) term sums. Histograms from parallel chunks add
//! exactly, which makes results independent of the worker count, and one
//! histogram yields ln Z at every coupling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, GF2Matrix, Subspace};
use crate::homology::ClassLabel;
use crate::lattice::Chain;
use crate::models::{nishimori_beta, DisorderSample, SpinModel};
use crate::toric::{Sector, ToricCode3D};

pub const DEFAULT_BUDGET_BITS: u32 = 20;
pub const HARD_CAP_BITS: u32 = 26;

/// Chunks are split on this many leading free bits.
const CHUNK_BITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    /// Largest number of enumerated spins (log2 of the state count).
    pub max_bits: u32,
    /// Quotient by the local spin-flip symmetries before enumerating.
    pub gauge_fixing: bool,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_bits: DEFAULT_BUDGET_BITS,
            gauge_fixing: true,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_bits: u32, gauge_fixing: bool) -> Result<Self> {
        if max_bits > HARD_CAP_BITS {
            return Err(Error::Budget {
                required_bits: max_bits,
                allowed_bits: HARD_CAP_BITS,
            });
        }
        Ok(Self {
            max_bits,
            gauge_fixing,
        })
    }

    pub fn raw(max_bits: u32) -> Result<Self> {
        Self::new(max_bits, false)
    }

    fn admit(&self, bits: usize) -> Result<()> {
        if bits as u32 > self.max_bits.min(HARD_CAP_BITS) {
            return Err(Error::Budget {
                required_bits: bits as u32,
                allowed_bits: self.max_bits.min(HARD_CAP_BITS),
            });
        }
        Ok(())
    }
}

/// Spins left free after gauge fixing, and the size of each gauge orbit.
#[derive(Clone, Debug)]
pub struct GaugeQuotient {
    n_spins: usize,
    free: Vec<usize>,
    symmetries: Option<Subspace>,
}

impl GaugeQuotient {
    pub fn new(model: &SpinModel, fix: bool) -> Result<Self> {
        let n = model.n_spins();
        let gens = if fix { model.local_symmetries() } else { Vec::new() };
        if gens.is_empty() {
            return Ok(Self {
                n_spins: n,
                free: (0..n).collect(),
                symmetries: None,
            });
        }
        let sub = Subspace::span(
            n,
            gens.into_iter()
                .map(|g| BitVec::from_indices(n, g.into_iter().map(|s| s as usize))),
        )?;
        let mut fixed = vec![false; n];
        for &p in sub.pivots() {
            fixed[p] = true;
        }
        Ok(Self {
            n_spins: n,
            free: (0..n).filter(|&s| !fixed[s]).collect(),
            symmetries: Some(sub),
        })
    }

    pub fn free_spins(&self) -> &[usize] {
        &self.free
    }

    pub fn rank(&self) -> usize {
        self.symmetries.as_ref().map_or(0, |s| s.rank())
    }

    /// Index among the free-spin states of the orbit containing `spins`.
    pub fn orbit_index(&self, spins: &[i8]) -> usize {
        let bits = BitVec::from_bools(&spins.iter().map(|&s| s < 0).collect::<Vec<_>>());
        let canon = match &self.symmetries {
            Some(sub) => sub.reduce(&bits),
            None => bits,
        };
        self.free
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &s)| acc | (canon.get(s) as usize) << j)
    }

    /// Spin configuration of a free-spin state index.
    pub fn state(&self, index: usize) -> Vec<i8> {
        let mut spins = vec![1i8; self.n_spins];
        for (j, &s) in self.free.iter().enumerate() {
            if index >> j & 1 == 1 {
                spins[s] = -1;
            }
        }
        spins
    }
}

/// Density of states over (spatial, temporal) term sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumHistogram {
    n_spatial: usize,
    n_temporal: usize,
    temporal_coupling: f64,
    /// log2 of the orbit size multiplying every count.
    gauge_rank: usize,
    free_bits: usize,
    /// counts[(a + n_spatial)/2 * (n_temporal + 1) + (b + n_temporal)/2]
    counts: Vec<u64>,
    /// Per observable, sum of its value over the states of each bin.
    observable_sums: Vec<Vec<i64>>,
}

impl SumHistogram {
    fn empty(n_spatial: usize, n_temporal: usize, k: f64, gauge_rank: usize, free_bits: usize, n_obs: usize) -> Self {
        let bins = (n_spatial + 1) * (n_temporal + 1);
        Self {
            n_spatial,
            n_temporal,
            temporal_coupling: k,
            gauge_rank,
            free_bits,
            counts: vec![0; bins],
            observable_sums: vec![vec![0; bins]; n_obs],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (sa, sb) in self.observable_sums.iter_mut().zip(&other.observable_sums) {
            for (a, b) in sa.iter_mut().zip(sb) {
                *a += b;
            }
        }
        self
    }

    pub fn free_bits(&self) -> usize {
        self.free_bits
    }

    pub fn gauge_rank(&self) -> usize {
        self.gauge_rank
    }

    pub fn total_states(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn bins(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        let nt = self.n_temporal + 1;
        (0..self.counts.len()).filter(|&i| self.counts[i] > 0).map(move |i| {
            let a = 2.0 * (i / nt) as f64 - self.n_spatial as f64;
            let b = 2.0 * (i % nt) as f64 - self.n_temporal as f64;
            (a + self.temporal_coupling * b, i)
        })
    }

    /// ln Z at inverse temperature `beta`, spatial coupling J = 1.
    pub fn log_partition(&self, beta: f64) -> f64 {
        let max = self
            .bins()
            .map(|(s, i)| beta * s + (self.counts[i] as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        let mut acc = Neumaier::default();
        for (s, i) in self.bins() {
            acc.add((beta * s + (self.counts[i] as f64).ln() - max).exp());
        }
        max + acc.sum().ln() + self.gauge_rank as f64 * std::f64::consts::LN_2
    }

    /// Thermal averages of the registered observables.
    pub fn expectations(&self, beta: f64) -> Vec<f64> {
        let max = self
            .bins()
            .map(|(s, _)| beta * s)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut z = Neumaier::default();
        let mut num: Vec<Neumaier> = vec![Neumaier::default(); self.observable_sums.len()];
        for (s, i) in self.bins() {
            let w = (beta * s - max).exp();
            z.add(self.counts[i] as f64 * w);
            for (o, sums) in num.iter_mut().zip(&self.observable_sums) {
                o.add(sums[i] as f64 * w);
            }
        }
        let z = z.sum();
        num.iter().map(|n| n.sum() / z).collect()
    }

    /// Mean of eta_t u_t over terms at `beta`.
    pub fn mean_overlap(&self, beta: f64) -> f64 {
        let max = self
            .bins()
            .map(|(s, _)| beta * s)
            .fold(f64::NEG_INFINITY, f64::max);
        let nt = self.n_temporal + 1;
        let (mut z, mut num) = (Neumaier::default(), Neumaier::default());
        for (s, i) in self.bins() {
            let w = self.counts[i] as f64 * (beta * s - max).exp();
            let a = 2.0 * (i / nt) as f64 - self.n_spatial as f64;
            let b = 2.0 * (i % nt) as f64 - self.n_temporal as f64;
            z.add(w);
            num.add(w * (a + b));
        }
        num.sum() / z.sum() / (self.n_spatial + self.n_temporal) as f64
    }
}

/// Neumaier-compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.c
    }
}

/// Enumerates every free-spin state, filling a [`SumHistogram`]. Each
/// observable is a set of spins whose product is tracked.
pub fn enumerate(
    model: &SpinModel,
    disorder: &DisorderSample,
    budget: &EnumerationBudget,
    observables: &[Vec<u32>],
) -> Result<SumHistogram> {
    if disorder.len() != model.n_terms() {
        return Err(Error::DimensionMismatch("disorder length differs from term count".into()));
    }
    let quotient = GaugeQuotient::new(model, budget.gauge_fixing)?;
    let free = quotient.free_spins();
    budget.admit(free.len())?;

    let n_spatial = model.term_classes().iter().filter(|&&c| c == 0).count();
    let n_temporal = model.n_terms() - n_spatial;
    let eta = disorder.signs();
    let mut spin_obs: Vec<Vec<usize>> = vec![Vec::new(); model.n_spins()];
    for (o, set) in observables.iter().enumerate() {
        for &s in set {
            spin_obs[s as usize].push(o);
        }
    }

    let prefix_bits = free.len().min(CHUNK_BITS);
    let low_bits = free.len() - prefix_bits;
    let empty = || {
        SumHistogram::empty(
            n_spatial,
            n_temporal,
            model.temporal_coupling(),
            quotient.rank(),
            free.len(),
            observables.len(),
        )
    };
    let nt1 = n_temporal + 1;
    let hist = (0..1usize << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut h = empty();
            let mut spins = vec![1i8; model.n_spins()];
            for j in 0..prefix_bits {
                if prefix >> j & 1 == 1 {
                    spins[free[low_bits + j]] = -1;
                }
            }
            let mut u = model.term_values(&spins);
            // sums of eta*u per class, offset to be non-negative halves
            let mut sums = [0i64; 2];
            for t in 0..model.n_terms() {
                sums[model.term_class(t) as usize] += (eta[t] * u[t]) as i64;
            }
            let mut obs: Vec<i8> = observables
                .iter()
                .map(|set| set.iter().fold(1i8, |a, &s| a * spins[s as usize]))
                .collect();
            let record = |sums: &[i64; 2], obs: &[i8], h: &mut SumHistogram| {
                let bin = ((sums[0] + n_spatial as i64) / 2) as usize * nt1
                    + ((sums[1] + n_temporal as i64) / 2) as usize;
                h.counts[bin] += 1;
                for (o, &v) in obs.iter().enumerate() {
                    h.observable_sums[o][bin] += v as i64;
                }
            };
            record(&sums, &obs, &mut h);
            for i in 1u64..1u64 << low_bits {
                let s = free[i.trailing_zeros() as usize];
                for &t in model.spin_terms(s) {
                    let t = t as usize;
                    sums[model.term_class(t) as usize] -= 2 * (eta[t] * u[t]) as i64;
                    u[t] = -u[t];
                }
                for &o in &spin_obs[s] {
                    obs[o] = -obs[o];
                }
                record(&sums, &obs, &mut h);
            }
            h
        })
        .reduce(empty, SumHistogram::merge);
    Ok(hist)
}

/// ln Z = ln sum exp(-beta H) over all spin states.
pub fn exact_log_partition(
    model: &SpinModel,
    disorder: &DisorderSample,
    beta: f64,
    budget: &EnumerationBudget,
) -> Result<f64> {
    Ok(enumerate(model, disorder, budget, &[])?.log_partition(beta))
}

/// Exact Boltzmann probabilities of the gauge orbits, indexed as
/// [`GaugeQuotient::orbit_index`].
pub fn exact_orbit_distribution(
    model: &SpinModel,
    disorder: &DisorderSample,
    beta: f64,
    quotient: &GaugeQuotient,
) -> Result<Vec<f64>> {
    let bits = quotient.free_spins().len();
    if bits > 24 {
        return Err(Error::Budget {
            required_bits: bits as u32,
            allowed_bits: 24,
        });
    }
    let log_w: Vec<f64> = (0..1usize << bits)
        .map(|i| Ok(-beta * model.energy(&quotient.state(i), disorder)?))
        .collect::<Result<_>>()?;
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// Total-variation distance between the empirical orbit frequencies of the
/// given states and the exact Boltzmann distribution.
pub fn mc_distribution_check<'a>(
    model: &SpinModel,
    disorder: &DisorderSample,
    beta: f64,
    states: impl IntoIterator<Item = &'a [i8]>,
) -> Result<f64> {
    let quotient = GaugeQuotient::new(model, true)?;
    if quotient.free_spins().len() > 16 {
        return Err(Error::Budget {
            required_bits: quotient.free_spins().len() as u32,
            allowed_bits: 16,
        });
    }
    let exact = exact_orbit_distribution(model, disorder, beta, &quotient)?;
    let mut counts = vec![0u64; exact.len()];
    let mut n = 0u64;
    for s in states {
        counts[quotient.orbit_index(s)] += 1;
        n += 1;
    }
    if n == 0 {
        return Err(Error::DegenerateStatistics("no states recorded".into()));
    }
    Ok(tv_distance(&counts, n, &exact))
}

pub fn tv_distance(counts: &[u64], n: u64, exact: &[f64]) -> f64 {
    0.5 * counts
        .iter()
        .zip(exact)
        .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
        .sum::<f64>()
}

/// Weight enumerator of the errors consistent with one syndrome, split by
/// class label.
#[derive(Clone, Debug)]
pub struct ClassEnumerator {
    pub sector: Sector,
    pub n_qubits: usize,
    /// counts[label][weight]
    pub counts: Vec<Vec<u64>>,
}

impl ClassEnumerator {
    /// Walks every error with the given static syndrome: one particular
    /// solution plus every element of the cycle space.
    pub fn new(code: &ToricCode3D, syndrome: &Chain, sector: Sector, budget: &EnumerationBudget) -> Result<Self> {
        let n = code.n_qubits();
        if n > 64 {
            return Err(Error::Resource("class enumeration supports at most 64 qubits".into()));
        }
        let cx = code.sector_complex(sector);
        let k = sector.qubit_rank();
        let m = cx.boundary_matrix(k)?;
        let e0 = code.realize_syndrome(syndrome, sector)?;
        let cycles = m.nullspace();
        budget.admit(cycles.len())?;
        let as_mask = |v: &BitVec| v.words().first().copied().unwrap_or(0);
        let basis: Vec<u64> = cycles.iter().map(as_mask).collect();
        let detectors: Vec<u64> = code.class_detectors(sector).iter().map(|d| as_mask(d.bits())).collect();
        let label_of = |e: u64| -> usize {
            detectors
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &d)| acc | (((e & d).count_ones() & 1) as usize) << i)
        };
        let n_labels = 1 << detectors.len();
        let start = as_mask(e0.bits());
        let prefix_bits = basis.len().min(CHUNK_BITS);
        let low_bits = basis.len() - prefix_bits;
        let empty = || vec![vec![0u64; n + 1]; n_labels];
        let counts = (0..1usize << prefix_bits)
            .into_par_iter()
            .map(|prefix| {
                let mut c = empty();
                let mut e = start;
                for j in 0..prefix_bits {
                    if prefix >> j & 1 == 1 {
                        e ^= basis[low_bits + j];
                    }
                }
                c[label_of(e)][e.count_ones() as usize] += 1;
                for i in 1u64..1u64 << low_bits {
                    e ^= basis[i.trailing_zeros() as usize];
                    c[label_of(e)][e.count_ones() as usize] += 1;
                }
                c
            })
            .reduce(empty, |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(&b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            });
        Ok(Self {
            sector,
            n_qubits: n,
            counts,
        })
    }

    /// ln of the i.i.d. probability mass of each class.
    pub fn log_masses(&self, p: f64) -> Vec<f64> {
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        self.counts
            .iter()
            .map(|row| {
                let terms: Vec<f64> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(w, &c)| {
                        let wl = if w == 0 { 0.0 } else { w as f64 * lp };
                        let ql = if w == self.n_qubits { 0.0 } else { (self.n_qubits - w) as f64 * lq };
                        (c as f64).ln() + wl + ql
                    })
                    .collect();
                log_sum_exp(&terms)
            })
            .collect()
    }

    pub fn probabilities(&self, p: f64) -> Vec<f64> {
        normalize_logs(&self.log_masses(p))
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = Neumaier::default();
    for &x in xs {
        acc.add((x - max).exp());
    }
    max + acc.sum().ln()
}

fn normalize_counts(c: &[u64]) -> Vec<f64> {
    let total: u64 = c.iter().sum();
    c.iter().map(|&x| x as f64 / total as f64).collect()
}

pub fn normalize_logs(logs: &[f64]) -> Vec<f64> {
    let total = log_sum_exp(logs);
    logs.iter().map(|l| (l - total).exp()).collect()
}

/// Probability of each logical class given a static syndrome, by brute
/// force over the consistent errors. Labels follow
/// [`ToricCode3D::relative_label`].
pub fn exact_class_probabilities(code: &ToricCode3D, syndrome: &Chain, sector: Sector, p: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    let e = ClassEnumerator::new(code, syndrome, sector, &EnumerationBudget::raw(HARD_CAP_BITS)?)?;
    if p == 0.0 || p == 1.0 {
        // only the lightest (or heaviest) consistent errors keep any mass
        let weights: Vec<usize> = (0..=code.n_qubits())
            .filter(|&w| e.counts.iter().any(|r| r[w] > 0))
            .collect();
        let w = if p == 0.0 { weights[0] } else { *weights.last().unwrap() };
        return Ok(normalize_counts(&e.counts.iter().map(|r| r[w]).collect::<Vec<_>>()));
    }
    Ok(e.probabilities(p))
}

/// Same probabilities from the spin model: partition functions of the static
/// model with disorder from `e0 + logical(l)`, at the Nishimori coupling.
pub fn class_probabilities_from_model(
    code: &ToricCode3D,
    syndrome: &Chain,
    sector: Sector,
    p: f64,
    budget: &EnumerationBudget,
) -> Result<Vec<f64>> {
    let beta = nishimori_beta(p)?;
    let model = code.static_model(sector)?;
    let e0 = code.realize_syndrome(syndrome, sector)?;
    let base = code.relative_label(&e0, sector)?;
    let n_labels = 1usize << 3;
    let mut logs = vec![0.0; n_labels];
    for l in 0..n_labels as ClassLabel {
        let e = &e0 + &code.logical_of(l, sector);
        let d = code.static_disorder(&model, &e, sector)?;
        logs[(base ^ l) as usize] = exact_log_partition(&model, &d, beta, budget)?;
    }
    Ok(normalize_logs(&logs))
}

/// -ln(pr_l / pr_0). Infinite when class `l` carries no mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFreeEnergy {
    pub beta_delta_f: f64,
    pub finite: bool,
}

pub fn class_free_energy_difference(
    code: &ToricCode3D,
    syndrome: &Chain,
    sector: Sector,
    p: f64,
    label: ClassLabel,
) -> Result<ClassFreeEnergy> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} outside (0, 1)")));
    }
    let e = ClassEnumerator::new(code, syndrome, sector, &EnumerationBudget::raw(HARD_CAP_BITS)?)?;
    let logs = e.log_masses(p);
    let l = *logs
        .get(label as usize)
        .ok_or_else(|| Error::Domain(format!("class label {label} out of range")))?;
    let v = logs[0] - l;
    Ok(ClassFreeEnergy {
        beta_delta_f: v,
        finite: v.is_finite(),
    })
}

/// Outcome of an exact Kramers-Wannier comparison at zero disorder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KwCheck {
    pub beta: f64,
    pub dual_beta: f64,
    pub ln_z: f64,
    pub ln_z_dual: f64,
    /// ln of N_g 2^{-N_dual_spins} (2 sinh 2beta)^{N_terms/2}
    pub ln_prefactor: f64,
    /// |ln Z - ln prefactor - ln Z_dual|
    pub residual: f64,
    /// Residual per spin of the first model.
    pub density_gap: f64,
    /// True when the spin-to-term map's image equals the constraint kernel,
    /// which is when the identity is exact.
    pub exact_sequence: bool,
}

/// Kramers-Wannier identity between a model and its constraint partner
/// ([`SpinModel::constraint_partner`]), both enumerated exactly.
pub fn kw_prefactor_check(
    model: &SpinModel,
    partner: &SpinModel,
    disorder: &DisorderSample,
    beta: f64,
    budget: &EnumerationBudget,
) -> Result<KwCheck> {
    if disorder.n_flipped() > 0 {
        return Err(Error::Unsupported(
            "the exact duality holds only without disorder".into(),
        ));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Domain("beta must be positive".into()));
    }
    if partner.n_terms() != model.n_terms() {
        return Err(Error::DimensionMismatch("partner models must share their terms".into()));
    }
    let dual_beta = crate::duality::kw_dual_coupling(beta)?;
    let d_map = incidence_matrix(model);
    let c_map = incidence_matrix(partner);
    let rank_d = d_map.rank();
    let rank_c = c_map.rank();
    let kernel_d = model.n_spins() - rank_d;
    let exact_sequence = rank_d + rank_c == model.n_terms() && composes_to_zero(model, partner);
    let ln_z = exact_log_partition(model, disorder, beta, budget)?;
    let ln_z_dual = exact_log_partition(partner, &DisorderSample::uniform(partner.n_terms()), dual_beta, budget)?;
    let ln2 = std::f64::consts::LN_2;
    let ln_prefactor = kernel_d as f64 * ln2 - partner.n_spins() as f64 * ln2
        + 0.5 * model.n_terms() as f64 * (2.0 * (2.0 * beta).sinh()).ln();
    let diff = ln_z - ln_prefactor - ln_z_dual;
    Ok(KwCheck {
        beta,
        dual_beta,
        ln_z,
        ln_z_dual,
        ln_prefactor,
        residual: diff.abs(),
        density_gap: diff / model.n_spins() as f64,
        exact_sequence,
    })
}

/// Terms × spins incidence over GF(2).
fn incidence_matrix(model: &SpinModel) -> GF2Matrix {
    let rows = (0..model.n_terms())
        .map(|t| BitVec::from_indices(model.n_spins(), model.term_members(t).iter().map(|&s| s as usize)))
        .collect();
    GF2Matrix::from_rows(model.n_spins(), rows).expect("row lengths match")
}

/// Every term of `model` flipped by a spin of `model` meets each partner
/// spin's term set an even number of times.
fn composes_to_zero(model: &SpinModel, partner: &SpinModel) -> bool {
    let partner_sets: Vec<BitVec> = (0..partner.n_spins())
        .map(|s| BitVec::from_indices(partner.n_terms(), partner.spin_terms(s).iter().map(|&t| t as usize)))
        .collect();
    (0..model.n_spins()).all(|s| {
        let image = BitVec::from_indices(model.n_terms(), model.spin_terms(s).iter().map(|&t| t as usize));
        partner_sets.iter().all(|c| !image.dot(c))
    })
}
