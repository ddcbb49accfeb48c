//! Law fits for Wilson observables and crossing-point estimates.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disorder-averaged Wilson observable of one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonMean {
    /// Edge lengths: (a, b) for loops, (a, b, c) for boxes.
    pub size: Vec<usize>,
    pub mean: f64,
    pub stderr: f64,
}

impl WilsonMean {
    pub fn new(size: &[usize], mean: f64, stderr: f64) -> Self {
        Self {
            size: size.to_vec(),
            mean,
            stderr,
        }
    }

    fn label(&self) -> String {
        let dims: Vec<String> = self.size.iter().map(|s| s.to_string()).collect();
        format!("{}={}", dims.join("x"), self.mean)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableFamily {
    Loops,
    Surfaces,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Perimeter,
    Area,
    Volume,
}

/// Coefficient with its one-sigma uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    /// Whether the value is positive beyond three standard deviations.
    pub fn significant(&self) -> bool {
        self.value > 3.0 * self.sigma && self.value > 1e-12
    }
}

/// Decay coefficients of -ln⟨W⟩.
///
/// Loops: -ln W(a,b) = area·ab + perimeter·2(a+b) + const.
/// Surfaces: -ln W(a,b,c) = volume·abc + area·2(ab+bc+ca) + perimeter·(a+b+c) + const.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawFit {
    pub family: ObservableFamily,
    pub perimeter: Estimate,
    pub area: Estimate,
    pub volume: Option<Estimate>,
    pub constant: f64,
    pub law: Law,
    /// Sizes dropped because their mean was not positive.
    pub excluded: Vec<WilsonMean>,
}

/// Points on a full grid, keyed by size, after removing non-positive means.
struct Grid {
    /// -ln⟨W⟩ and its variance
    values: BTreeMap<Vec<usize>, (f64, f64)>,
    excluded: Vec<WilsonMean>,
}

impl Grid {
    fn new(means: &[WilsonMean], dim: usize) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut excluded = Vec::new();
        for m in means {
            if m.size.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "expected {dim} edge lengths, got {:?}",
                    m.size
                )));
            }
            if m.mean > 0.0 && m.mean.is_finite() {
                let sigma = m.stderr / m.mean;
                values.insert(m.size.clone(), (-m.mean.ln(), sigma * sigma));
            } else {
                log::warn!("excluding non-positive Wilson mean {}", m.label());
                excluded.push(m.clone());
            }
        }
        Ok(Self { values, excluded })
    }

    fn get(&self, size: &[usize]) -> Option<(f64, f64)> {
        self.values.get(size).copied()
    }

    /// Mixed forward difference over the axes in `axes` at `size`, with its
    /// variance; `None` if a corner is missing.
    fn difference(&self, size: &[usize], axes: &[usize]) -> Option<(f64, f64)> {
        let mut value = 0.0;
        let mut var = 0.0;
        for corner in 0..1usize << axes.len() {
            let mut s = size.to_vec();
            let mut sign = 1.0;
            for (j, &a) in axes.iter().enumerate() {
                if corner >> j & 1 == 1 {
                    if s[a] == 0 {
                        return None;
                    }
                    s[a] -= 1;
                    sign = -sign;
                }
            }
            let (v, e) = self.get(&s)?;
            value += sign * v;
            var += e;
        }
        Some((value, var))
    }

    fn unfittable(&self, reason: String) -> Error {
        Error::Unfittable {
            reason,
            excluded: self.excluded.iter().map(WilsonMean::label).collect(),
        }
    }
}

/// Inverse-variance mean of finite-difference values; falls back to the
/// scatter when no error bars were supplied, and never reports less than
/// the scatter warrants.
fn combine(samples: &[(f64, f64)]) -> Estimate {
    let n = samples.len() as f64;
    let plain = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let scatter = if samples.len() > 1 {
        (samples.iter().map(|s| (s.0 - plain).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    if samples.iter().all(|s| s.1 > 0.0) {
        let w: f64 = samples.iter().map(|s| 1.0 / s.1).sum();
        let value = samples.iter().map(|s| s.0 / s.1).sum::<f64>() / w;
        Estimate {
            value,
            sigma: (1.0 / w).sqrt().max(scatter),
        }
    } else {
        Estimate {
            value: plain,
            sigma: scatter,
        }
    }
}

fn stencils<'g>(grid: &'g Grid, axes: &'g [usize]) -> impl Iterator<Item = (f64, f64)> + 'g {
    grid.values.keys().filter_map(move |s| grid.difference(s, axes))
}

fn distinct(grid: &Grid, axis: usize) -> usize {
    let mut v: Vec<usize> = grid.values.keys().map(|s| s[axis]).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Fits loop means over a grid of a×b rectangles.
pub fn fit_loop_law(means: &[WilsonMean]) -> Result<LawFit> {
    let grid = Grid::new(means, 2)?;
    if distinct(&grid, 0) < 3 || distinct(&grid, 1) < 3 {
        return Err(grid.unfittable("loop fits need at least a 3x3 grid of positive means".into()));
    }
    let chi: Vec<(f64, f64)> = stencils(&grid, &[0, 1]).collect();
    // two stencils give a scatter; a single excluded corner need not end the fit
    if chi.len() < 2 {
        return Err(grid.unfittable(format!("only {} complete second-difference stencils", chi.len())));
    }
    let area = combine(&chi);
    // residual is linear in a + b; its first differences give 2·perimeter
    let residual = |s: &[usize]| grid.get(s).map(|(v, e)| (v - area.value * (s[0] * s[1]) as f64, e));
    let mut steps = Vec::new();
    for s in grid.values.keys() {
        for axis in 0..2 {
            if s[axis] == 0 {
                continue;
            }
            let mut prev = s.clone();
            prev[axis] -= 1;
            if let (Some(r1), Some(r0)) = (residual(s), residual(&prev)) {
                steps.push(((r1.0 - r0.0) / 2.0, (r1.1 + r0.1) / 4.0));
            }
        }
    }
    let perimeter = combine(&steps);
    let constant = mean_constant(&grid, |s| area.value * (s[0] * s[1]) as f64 + perimeter.value * 2.0 * (s[0] + s[1]) as f64);
    Ok(LawFit {
        family: ObservableFamily::Loops,
        law: if area.significant() { Law::Area } else { Law::Perimeter },
        perimeter,
        area,
        volume: None,
        constant,
        excluded: grid.excluded,
    })
}

/// Fits surface means over a grid of a×b×c boxes.
pub fn fit_surface_law(means: &[WilsonMean]) -> Result<LawFit> {
    let grid = Grid::new(means, 3)?;
    if (0..3).any(|a| distinct(&grid, a) < 3) {
        return Err(grid.unfittable("surface fits need at least a 3x3x3 grid of positive means".into()));
    }
    let third: Vec<(f64, f64)> = stencils(&grid, &[0, 1, 2]).collect();
    if third.len() < 2 {
        return Err(grid.unfittable(format!("only {} complete third-difference stencils", third.len())));
    }
    let volume = combine(&third);
    let after_volume: BTreeMap<Vec<usize>, (f64, f64)> = grid
        .values
        .iter()
        .map(|(s, &(v, e))| (s.clone(), (v - volume.value * (s[0] * s[1] * s[2]) as f64, e)))
        .collect();
    let sub = Grid {
        values: after_volume,
        excluded: Vec::new(),
    };
    // each mixed second difference of 2(ab+bc+ca) equals 2
    let mut second = Vec::new();
    for pair in [[0, 1], [1, 2], [0, 2]] {
        second.extend(stencils(&sub, &pair).map(|(v, e)| (v / 2.0, e / 4.0)));
    }
    let area = combine(&second);
    let linear = |s: &[usize]| {
        volume.value * (s[0] * s[1] * s[2]) as f64 + area.value * 2.0 * (s[0] * s[1] + s[1] * s[2] + s[0] * s[2]) as f64
    };
    let mut steps = Vec::new();
    for s in grid.values.keys() {
        for axis in 0..3 {
            if s[axis] == 0 {
                continue;
            }
            let mut prev = s.clone();
            prev[axis] -= 1;
            if let (Some(r1), Some(r0)) = (grid.get(s), grid.get(&prev)) {
                steps.push((r1.0 - linear(s) - (r0.0 - linear(&prev)), r1.1 + r0.1));
            }
        }
    }
    let perimeter = combine(&steps);
    let constant = mean_constant(&grid, |s| linear(s) + perimeter.value * (s[0] + s[1] + s[2]) as f64);
    Ok(LawFit {
        family: ObservableFamily::Surfaces,
        law: if volume.significant() { Law::Volume } else { Law::Area },
        perimeter,
        area,
        volume: Some(volume),
        constant,
        excluded: grid.excluded,
    })
}

fn mean_constant(grid: &Grid, model: impl Fn(&[usize]) -> f64) -> f64 {
    let n = grid.values.len() as f64;
    grid.values.iter().map(|(s, (v, _))| v - model(s)).sum::<f64>() / n
}

/// How per-sample records at one grid point reduce to the crossing quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Mean of the first component.
    #[default]
    Mean,
    /// 1 - [m4] / (3 [m2]^2) from per-sample thermal moments (m2, m4).
    BinderFromMoments,
}

impl Statistic {
    pub fn reduce(self, samples: &[Vec<f64>]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::DegenerateStatistics("grid point has no samples".into()));
        }
        let n = samples.len() as f64;
        let mean = |i: usize| samples.iter().map(|s| s[i]).sum::<f64>() / n;
        match self {
            Statistic::Mean => Ok(mean(0)),
            Statistic::BinderFromMoments => {
                if samples.iter().any(|s| s.len() < 2) {
                    return Err(Error::Precondition("moment records need (m2, m4)".into()));
                }
                let m2 = mean(0);
                if m2 == 0.0 {
                    return Err(Error::UndefinedCumulant);
                }
                Ok(1.0 - mean(1) / (3.0 * m2 * m2))
            }
        }
    }
}

/// Per-sample records of one system size along a parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingCurve {
    pub size: usize,
    pub xs: Vec<f64>,
    /// `samples[i]` holds the per-sample records at `xs[i]`.
    pub samples: Vec<Vec<Vec<f64>>>,
}

impl CrossingCurve {
    pub fn values(&self, stat: Statistic) -> Result<Vec<f64>> {
        self.samples.iter().map(|s| stat.reduce(s)).collect()
    }

    /// A curve with exact values and no resampling noise.
    pub fn exact(size: usize, xs: &[f64], ys: &[f64]) -> Self {
        Self {
            size,
            xs: xs.to_vec(),
            samples: ys.iter().map(|&y| vec![vec![y]]).collect(),
        }
    }
}

/// Crossing of one pair of sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub sizes: (usize, usize),
    pub x: f64,
    /// Grid points bracketing the sign change.
    pub bracket: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub x_c: f64,
    pub sigma: f64,
    pub pairs: Vec<PairCrossing>,
    /// Bootstrap replicas that produced a crossing, out of `bootstrap`.
    pub successful_replicas: usize,
    pub bootstrap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingOptions {
    pub statistic: Statistic,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            statistic: Statistic::Mean,
            bootstrap: 200,
            seed: 0,
        }
    }
}

/// Linear interpolation of (xs, ys) at x, for x inside the range.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    if x1 == x0 {
        return ys[k];
    }
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

/// First sign change of the difference of two piecewise-linear curves,
/// scanned over the union of their grids.
fn pair_crossing(a: (&[f64], &[f64]), b: (&[f64], &[f64])) -> std::result::Result<(f64, (f64, f64)), String> {
    let lo = a.0[0].max(b.0[0]);
    let hi = a.0[a.0.len() - 1].min(b.0[b.0.len() - 1]);
    if lo >= hi {
        return Err("parameter ranges do not overlap".into());
    }
    let mut grid: Vec<f64> = a.0.iter().chain(b.0).copied().filter(|&x| x >= lo && x <= hi).collect();
    grid.sort_by(|x, y| x.total_cmp(y));
    grid.dedup();
    let diff = |x: f64| interpolate(b.0, b.1, x) - interpolate(a.0, a.1, x);
    let d: Vec<f64> = grid.iter().map(|&x| diff(x)).collect();
    // sign changes between consecutive nonzero differences; exact ties in
    // between are resolved to the middle of the tied run
    let nonzero: Vec<usize> = (0..d.len()).filter(|&i| d[i] != 0.0).collect();
    for w in nonzero.windows(2) {
        let (i, j) = (w[0], w[1]);
        if d[i].signum() == d[j].signum() {
            continue;
        }
        if j == i + 1 {
            let t = d[i] / (d[i] - d[j]);
            return Ok((grid[i] + t * (grid[j] - grid[i]), (grid[i], grid[j])));
        }
        let tied = &grid[i + 1..j];
        return Ok((tied.iter().sum::<f64>() / tied.len() as f64, (grid[i], grid[j])));
    }
    let Some(&first) = nonzero.first() else {
        return Err(format!("curves coincide on [{lo}, {hi}]"));
    };
    let side = if d[first] > 0.0 { "above" } else { "below" };
    Err(format!("larger size stays {side} on [{lo}, {hi}] (gap {:.3e} .. {:.3e})", d[0], d[d.len() - 1]))
}

fn crossings(curves: &[(usize, &[f64], Vec<f64>)]) -> std::result::Result<Vec<PairCrossing>, Vec<String>> {
    let mut found = Vec::new();
    let mut misses = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let (la, xa, ya) = &curves[i];
            let (lb, xb, yb) = &curves[j];
            match pair_crossing((xa, ya), (xb, yb)) {
                Ok((x, bracket)) => found.push(PairCrossing {
                    sizes: (*la, *lb),
                    x,
                    bracket,
                }),
                Err(why) => misses.push(format!("L={la} vs L={lb}: {why}")),
            }
        }
    }
    if found.is_empty() {
        Err(misses)
    } else {
        Ok(found)
    }
}

/// Locates where curves of different sizes cross, averaging all pairwise
/// crossings; the uncertainty comes from resampling disorder samples.
pub fn estimate_crossing(curves: &[CrossingCurve], opts: CrossingOptions) -> Result<CrossingEstimate> {
    let mut sizes: Vec<usize> = curves.iter().map(|c| c.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() != curves.len() || curves.len() < 2 {
        return Err(Error::Precondition("need at least two distinct system sizes".into()));
    }
    for c in curves {
        if c.xs.len() < 4 || c.samples.len() != c.xs.len() {
            return Err(Error::Precondition(format!(
                "L={}: need at least 4 grid points with samples at each",
                c.size
            )));
        }
        if c.xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(format!("L={}: grid must be increasing", c.size)));
        }
    }
    let central: Vec<(usize, &[f64], Vec<f64>)> = curves
        .iter()
        .map(|c| Ok((c.size, c.xs.as_slice(), c.values(opts.statistic)?)))
        .collect::<Result<_>>()?;
    let pairs = crossings(&central).map_err(|misses| Error::NoCrossing(misses.join("; ")))?;
    let x_c = pairs.iter().map(|p| p.x).sum::<f64>() / pairs.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut replicas = Vec::with_capacity(opts.bootstrap);
    for _ in 0..opts.bootstrap {
        let resampled: Vec<(usize, &[f64], Vec<f64>)> = curves
            .iter()
            .map(|c| {
                let ys = c
                    .samples
                    .iter()
                    .map(|s| {
                        let pick: Vec<Vec<f64>> = (0..s.len()).map(|_| s[rng.gen_range(0..s.len())].clone()).collect();
                        opts.statistic.reduce(&pick)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok((c.size, c.xs.as_slice(), ys))
            })
            .collect::<Result<_>>()?;
        if let Ok(p) = crossings(&resampled) {
            replicas.push(p.iter().map(|p| p.x).sum::<f64>() / p.len() as f64);
        }
    }
    let sigma = if replicas.len() > 1 {
        let m = replicas.iter().sum::<f64>() / replicas.len() as f64;
        (replicas.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (replicas.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(CrossingEstimate {
        x_c,
        sigma,
        pairs,
        successful_replicas: replicas.len(),
        bootstrap: opts.bootstrap,
    })
}
