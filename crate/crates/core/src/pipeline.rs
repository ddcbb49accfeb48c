//! Configured experiments: Monte Carlo runs, parameter sweeps, threshold
//! estimates, and the manifests that make them replayable.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{estimate_crossing, CrossingCurve, CrossingEstimate, CrossingOptions, Statistic};
use crate::duality::{dual_critical_p, self_dual_threshold, shannon_entropy};
use crate::error::{Error, Result};
use crate::lattice::{BoundaryCondition, CellComplex};
use crate::mc::{self, InitialState, McConfig, SampleRun, SweepOrder};
use crate::models::{nishimori_beta, ModelKind, SpinModel};
use crate::toric::nishimori_anisotropy;

/// Parses a JSON document, reporting schema violations with their position.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Config(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e)))
    })
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// Lattice on which a model is built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    /// Vertices per axis for open axes, period for periodic ones.
    pub lengths: Vec<usize>,
    #[serde(default)]
    pub open: bool,
}

impl LatticeSpec {
    pub fn cubic(dim: usize, l: usize) -> Self {
        Self {
            lengths: vec![l; dim],
            open: false,
        }
    }

    pub fn build(&self) -> Result<CellComplex> {
        let bc = if self.open {
            BoundaryCondition::Open
        } else {
            BoundaryCondition::Periodic
        };
        CellComplex::new(self.lengths.len(), &self.lengths, &vec![bc; self.lengths.len()])
    }
}

/// Builds `kind` on `lattice`; with `q` set, temporal terms use the
/// anisotropic Nishimori coupling of (p, q).
pub fn build_model(kind: ModelKind, lattice: &LatticeSpec, p: f64, q: Option<f64>) -> Result<SpinModel> {
    let model = SpinModel::build(kind, Arc::new(lattice.build()?))?;
    match q {
        Some(q) if q != p => model.with_anisotropy(kind.default_temporal_terms(), nishimori_anisotropy(p, q)?),
        _ => Ok(model),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", untagged)]
pub enum BetaSpec {
    /// `"nishimori"`: the coupling fixed by p.
    Named(NamedBeta),
    Ladder(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBeta {
    Nishimori,
}

/// `mc run`: one model, one error rate, one temperature ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McRunConfig {
    pub model: ModelKind,
    pub lattice: LatticeSpec,
    pub p: f64,
    #[serde(default)]
    pub q: Option<f64>,
    pub beta: BetaSpec,
    pub seed: u64,
    pub samples: usize,
    pub thermalization: usize,
    pub measurements: usize,
    #[serde(default = "one")]
    pub interval: usize,
    #[serde(default)]
    pub order: SweepOrder,
    #[serde(default)]
    pub init: InitialState,
    #[serde(default)]
    pub tempering: bool,
    #[serde(default)]
    pub loops: Vec<(usize, usize)>,
    #[serde(default)]
    pub surfaces: Vec<(usize, usize, usize)>,
}

fn one() -> usize {
    1
}

fn default_bootstrap() -> usize {
    200
}

impl McRunConfig {
    pub fn betas(&self) -> Result<Vec<f64>> {
        match &self.beta {
            BetaSpec::Named(NamedBeta::Nishimori) => Ok(vec![nishimori_beta(self.p)?]),
            BetaSpec::Ladder(b) => Ok(b.clone()),
        }
    }

    pub fn mc_config(&self) -> Result<McConfig> {
        let cfg = McConfig {
            thermalization: self.thermalization,
            measurements: self.measurements,
            interval: self.interval,
            betas: self.betas()?,
            seed: self.seed,
            samples: self.samples,
            order: self.order,
            tempering: self.tempering,
            init: self.init,
            loops: self.loops.clone(),
            surfaces: self.surfaces.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Per-column disorder averages of one rung.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungSummary {
    pub beta: f64,
    pub means: BTreeMap<String, (f64, f64)>,
    pub acceptance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McRunOutput {
    pub runs: Vec<SampleRun>,
    pub summary: Vec<RungSummary>,
}

pub fn summarize(runs: &[SampleRun]) -> Result<Vec<RungSummary>> {
    let Some(first) = runs.first() else {
        return Err(Error::DegenerateStatistics("no samples".into()));
    };
    let mut out = Vec::new();
    for (rung, s) in first.series.iter().enumerate() {
        let series = mc::rung_series(runs, rung);
        let mut means = BTreeMap::new();
        for col in &s.columns {
            let values: Vec<f64> = series.iter().map(|x| x.mean(col).unwrap_or(f64::NAN)).collect();
            let avg = if values.len() > 1 {
                let a = mc::average_values(col, &values)?;
                (a.mean, a.stderr)
            } else {
                (values[0], f64::NAN)
            };
            means.insert(col.clone(), avg);
        }
        let acceptance = runs.iter().map(|r| r.acceptance[rung]).sum::<f64>() / runs.len() as f64;
        out.push(RungSummary {
            beta: s.beta,
            means,
            acceptance,
        });
    }
    Ok(out)
}

pub fn mc_run(cfg: &McRunConfig) -> Result<McRunOutput> {
    let model = build_model(cfg.model, &cfg.lattice, cfg.p, cfg.q)?;
    let runs = mc::run_ensemble(&model, cfg.p, cfg.q, &cfg.mc_config()?)?;
    let summary = summarize(&runs)?;
    Ok(McRunOutput { runs, summary })
}

/// Parameter axis of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepAxis {
    /// Error rates along the Nishimori line; every point draws fresh disorder.
    Nishimori { p: Vec<f64> },
    /// Inverse temperatures at fixed error rate, run as one ladder per sample.
    Beta { p: f64, betas: Vec<f64> },
}

/// `mc sweep`: one model over several sizes and an axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub sizes: Vec<usize>,
    pub axis: SweepAxis,
    pub seed: u64,
    pub samples: usize,
    pub thermalization: usize,
    pub measurements: usize,
    #[serde(default = "one")]
    pub interval: usize,
    #[serde(default)]
    pub order: SweepOrder,
    #[serde(default)]
    pub init: InitialState,
    /// Replica exchange along a beta axis.
    #[serde(default)]
    pub tempering: bool,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

/// Disorder-averaged results at one (size, parameter) point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub size: usize,
    pub x: f64,
    pub p: f64,
    pub beta: f64,
    pub samples: usize,
    pub means: BTreeMap<String, (f64, f64)>,
    /// 1 - [<m^4>] / (3 [<m^2>]^2), when the model has a magnetization.
    pub binder: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    /// Per-sample (m2, m4) records for crossing analysis.
    pub curves: Vec<CrossingCurve>,
}

impl SweepOutput {
    pub fn crossing(&self, bootstrap: usize, seed: u64) -> Result<CrossingEstimate> {
        estimate_crossing(
            &self.curves,
            CrossingOptions {
                statistic: Statistic::BinderFromMoments,
                bootstrap,
                seed,
            },
        )
    }
}

/// Independent seed for one (size, grid point) cell of a sweep.
fn point_seed(master: u64, size: usize, index: usize) -> u64 {
    // splitmix64 finalizer over the packed coordinates
    let mut z = master ^ ((size as u64) << 40) ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn mc_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    if cfg.sizes.is_empty() {
        return Err(Error::Config("sweep needs at least one size".into()));
    }
    let mut points = Vec::new();
    let mut curves = Vec::new();
    for &l in &cfg.sizes {
        let lattice = LatticeSpec::cubic(cfg.model.dim(), l);
        let mut curve = CrossingCurve {
            size: l,
            xs: Vec::new(),
            samples: Vec::new(),
        };
        // (p, ladder, grid index offset)
        let jobs: Vec<(f64, Vec<f64>)> = match &cfg.axis {
            SweepAxis::Nishimori { p } => p.iter().map(|&p| Ok((p, vec![nishimori_beta(p)?]))).collect::<Result<_>>()?,
            SweepAxis::Beta { p, betas } => vec![(*p, betas.clone())],
        };
        for (index, (p, betas)) in jobs.into_iter().enumerate() {
            log::info!("{} L={l}: p={p}, {} temperature(s)", cfg.model, betas.len());
            let model = build_model(cfg.model, &lattice, p, None)?;
            let mc_cfg = McConfig {
                thermalization: cfg.thermalization,
                measurements: cfg.measurements,
                interval: cfg.interval,
                betas,
                seed: point_seed(cfg.seed, l, index),
                samples: cfg.samples,
                order: cfg.order,
                tempering: cfg.tempering,
                init: cfg.init,
                loops: Vec::new(),
                surfaces: Vec::new(),
            };
            let runs = mc::run_ensemble(&model, p, None, &mc_cfg)?;
            let summary = summarize(&runs)?;
            for (rung, s) in summary.into_iter().enumerate() {
                let x = match cfg.axis {
                    SweepAxis::Nishimori { .. } => p,
                    SweepAxis::Beta { .. } => s.beta,
                };
                let mut binder = None;
                if model.kind().has_magnetization() {
                    let moments: Vec<Vec<f64>> = mc::rung_series(&runs, rung)
                        .into_iter()
                        .map(|series| mc::thermal_moments(series).map(|(a, b)| vec![a, b]))
                        .collect::<Result<_>>()?;
                    binder = Some(Statistic::BinderFromMoments.reduce(&moments)?);
                    curve.xs.push(x);
                    curve.samples.push(moments);
                }
                points.push(SweepPoint {
                    size: l,
                    x,
                    p,
                    beta: s.beta,
                    samples: runs.len(),
                    means: s.means,
                    binder,
                });
            }
        }
        if !curve.xs.is_empty() {
            curves.push(curve);
        }
    }
    Ok(SweepOutput { points, curves })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    /// Locate p_c from a Nishimori-line Binder crossing.
    Sweep,
    /// A self-dual model sits where the entropy equals one half.
    SelfDual,
    /// Use a known critical rate and only apply the duality.
    Reference,
}

/// Nishimori-line Binder sweep settings of a threshold run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NishimoriSweep {
    pub sizes: Vec<usize>,
    pub p: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub thermalization: usize,
    pub measurements: usize,
    #[serde(default = "one")]
    pub interval: usize,
    #[serde(default)]
    pub order: SweepOrder,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

/// `threshold run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub model: ModelKind,
    pub method: ThresholdMethod,
    /// Required by the reference method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_c: Option<f64>,
    /// Required by the sweep method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<NishimoriSweep>,
}

impl ThresholdConfig {
    pub fn self_dual(model: ModelKind) -> Self {
        Self {
            model,
            method: ThresholdMethod::SelfDual,
            p_c: None,
            sweep: None,
        }
    }

    pub fn reference(model: ModelKind, p_c: f64) -> Self {
        Self {
            model,
            method: ThresholdMethod::Reference,
            p_c: Some(p_c),
            sweep: None,
        }
    }

    pub fn sweep(model: ModelKind, sweep: NishimoriSweep) -> Self {
        Self {
            model,
            method: ThresholdMethod::Sweep,
            p_c: None,
            sweep: Some(sweep),
        }
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn validate(&self) -> Result<()> {
        let (needs_p_c, needs_sweep) = match self.method {
            ThresholdMethod::Sweep => (false, true),
            ThresholdMethod::SelfDual => (false, false),
            ThresholdMethod::Reference => (true, false),
        };
        if needs_p_c != self.p_c.is_some() {
            return Err(Error::Config(format!(
                "\"p_c\" is {} for method {:?}",
                if needs_p_c { "required" } else { "not allowed" },
                self.method
            )));
        }
        if needs_sweep != self.sweep.is_some() {
            return Err(Error::Config(format!(
                "\"sweep\" is {} for method {:?}",
                if needs_sweep { "required" } else { "not allowed" },
                self.method
            )));
        }
        Ok(())
    }

    pub fn sweep_config(&self) -> Option<SweepConfig> {
        let s = self.sweep.as_ref()?;
        Some(SweepConfig {
            model: self.model,
            sizes: s.sizes.clone(),
            axis: SweepAxis::Nishimori { p: s.p.clone() },
            seed: s.seed,
            samples: s.samples,
            thermalization: s.thermalization,
            measurements: s.measurements,
            interval: s.interval,
            order: s.order,
            init: InitialState::Cold,
            tempering: false,
            bootstrap: s.bootstrap,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub model: ModelKind,
    pub dual_model: ModelKind,
    pub method: String,
    pub p_c: f64,
    pub p_c_sigma: f64,
    /// Partner threshold from H(p_c) + H(p̃_c) = 1.
    pub dual_p_c: f64,
    pub dual_p_c_sigma: f64,
    pub entropy: f64,
    pub crossing: Option<CrossingEstimate>,
    pub points: Vec<SweepPoint>,
}

/// σ of the partner rate by linear propagation through the entropy relation.
fn dual_sigma(p: f64, dual: f64, sigma: f64) -> f64 {
    let slope = |x: f64| ((1.0 - x) / x).log2();
    (slope(p) / slope(dual)).abs() * sigma
}

pub fn threshold_pipeline(cfg: &ThresholdConfig) -> Result<ThresholdReport> {
    cfg.validate()?;
    let model = cfg.model;
    let (method, p_c, sigma, crossing, points) = match cfg.method {
        ThresholdMethod::SelfDual => {
            if model.dual() != model {
                return Err(Error::Config(format!("{model} is not self-dual")));
            }
            ("self_dual", self_dual_threshold(), 0.0, None, Vec::new())
        }
        ThresholdMethod::Reference => ("reference", cfg.p_c.expect("validated"), 0.0, None, Vec::new()),
        ThresholdMethod::Sweep => {
            if !model.has_magnetization() {
                return Err(Error::Config(format!(
                    "{model} has no magnetization; Binder sweeps need RBIM3 or RBIM4"
                )));
            }
            let sweep_cfg = cfg.sweep_config().expect("validated");
            let sweep = mc_sweep(&sweep_cfg)?;
            let est = sweep.crossing(sweep_cfg.bootstrap, sweep_cfg.seed)?;
            ("sweep", est.x_c, est.sigma, Some(est), sweep.points)
        }
    };
    let dual_p_c = dual_critical_p(p_c)?;
    Ok(ThresholdReport {
        model,
        dual_model: model.dual(),
        method: method.into(),
        p_c,
        p_c_sigma: sigma,
        dual_p_c,
        dual_p_c_sigma: dual_sigma(p_c, dual_p_c, sigma),
        entropy: shannon_entropy(p_c)?,
        crossing,
        points,
    })
}

/// What was run, with what, and a hash of what came out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub model: ModelKind,
    pub lattice: Vec<Vec<usize>>,
    pub p: Vec<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    /// "nishimori" or the inverse temperatures used.
    pub beta: serde_json::Value,
    pub seed: Option<u64>,
    pub timestamp: String,
    /// The full configuration, sufficient to rerun the command.
    pub config: serde_json::Value,
    pub output_sha256: String,
}

/// SHA-256 of the canonical JSON encoding of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// A configured command, as recorded in manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    McRun(McRunConfig),
    McSweep(SweepConfig),
    Threshold(ThresholdConfig),
}

/// Output of a [`Command`].
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum CommandOutput {
    McRun(McRunOutput),
    McSweep(SweepOutput),
    Threshold(ThresholdReport),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::McRun(_) => "mc run",
            Command::McSweep(_) => "mc sweep",
            Command::Threshold(_) => "threshold run",
        }
    }

    pub fn execute(&self) -> Result<CommandOutput> {
        Ok(match self {
            Command::McRun(c) => CommandOutput::McRun(mc_run(c)?),
            Command::McSweep(c) => CommandOutput::McSweep(mc_sweep(c)?),
            Command::Threshold(c) => CommandOutput::Threshold(threshold_pipeline(c)?),
        })
    }

    pub fn manifest(&self, output: &CommandOutput) -> Result<RunManifest> {
        let (model, lattice, p, q, beta, seed) = match self {
            Command::McRun(c) => (
                c.model,
                vec![c.lattice.lengths.clone()],
                vec![c.p],
                c.q,
                serde_json::to_value(&c.beta)?,
                Some(c.seed),
            ),
            Command::McSweep(c) => {
                let lat = c.sizes.iter().map(|&l| vec![l; c.model.dim()]).collect();
                let (p, beta) = match &c.axis {
                    SweepAxis::Nishimori { p } => (p.clone(), serde_json::json!("nishimori")),
                    SweepAxis::Beta { p, betas } => (vec![*p], serde_json::to_value(betas)?),
                };
                (c.model, lat, p, None, beta, Some(c.seed))
            }
            Command::Threshold(c) => match &c.sweep {
                Some(sw) => (
                    c.model,
                    sw.sizes.iter().map(|&l| vec![l; c.model.dim()]).collect(),
                    sw.p.clone(),
                    None,
                    serde_json::json!("nishimori"),
                    Some(sw.seed),
                ),
                None => (c.model, vec![], c.p_c.into_iter().collect(), None, serde_json::Value::Null, None),
            },
        };
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.name().into(),
            model,
            lattice,
            p,
            q,
            beta,
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            config: serde_json::to_value(self)?,
            output_sha256: content_hash(output)?,
        })
    }

    pub fn from_manifest(m: &RunManifest) -> Result<Self> {
        serde_json::from_value(m.config.clone())
            .map_err(|e| Error::Config(format!("manifest config: {e}")))
    }
}

/// Reruns the command recorded in a manifest; `Ok(true)` when the outputs
/// hash to the recorded value.
pub fn replay(m: &RunManifest) -> Result<bool> {
    let cmd = Command::from_manifest(m)?;
    let out = cmd.execute()?;
    Ok(content_hash(&out)? == m.output_sha256)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_errors_point_at_the_line() {
        let text = "{\n  \"method\": \"reference\",\n  \"model\": \"RBIM3\",\n  \"pc\": 0.2\n}";
        match parse_config::<ThresholdConfig>(text) {
            Err(Error::Config(msg)) => assert!(msg.starts_with("line 4"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let ok: ThresholdConfig = parse_config("{\"method\":\"self_dual\",\"model\":\"RPGM4\"}").unwrap();
        assert_eq!(ok.model(), ModelKind::Rpgm4);
        let missing: ThresholdConfig = parse_config("{\"method\":\"reference\",\"model\":\"RBIM3\"}").unwrap();
        assert!(matches!(threshold_pipeline(&missing), Err(Error::Config(_))));
    }

    #[test]
    fn analytic_thresholds() {
        let r = threshold_pipeline(&ThresholdConfig::self_dual(ModelKind::Rpgm4)).unwrap();
        assert!((r.p_c - 0.1100).abs() < 5e-4);
        assert!((r.dual_p_c - r.p_c).abs() < 1e-9);
        assert!(threshold_pipeline(&ThresholdConfig::self_dual(ModelKind::Rbim4)).is_err());
        let r = threshold_pipeline(&ThresholdConfig::reference(ModelKind::Rbim3, 0.233)).unwrap();
        assert_eq!(r.dual_model, ModelKind::Rpgm3);
        assert!((0.030..=0.037).contains(&r.dual_p_c));
    }

    #[test]
    fn mc_run_replays() {
        let cfg = McRunConfig {
            model: ModelKind::Rpgm3,
            lattice: LatticeSpec::cubic(3, 3),
            p: 0.1,
            q: None,
            beta: BetaSpec::Named(NamedBeta::Nishimori),
            seed: 5,
            samples: 3,
            thermalization: 5,
            measurements: 20,
            interval: 2,
            order: SweepOrder::Sequential,
            init: InitialState::Cold,
            tempering: false,
            loops: vec![(1, 1), (1, 2)],
            surfaces: vec![],
        };
        let cmd = Command::McRun(cfg);
        let out = cmd.execute().unwrap();
        let m = cmd.manifest(&out).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert!(replay(&back).unwrap());
    }

    #[test]
    fn beta_spec_forms() {
        let b: BetaSpec = serde_json::from_str("\"nishimori\"").unwrap();
        assert_eq!(b, BetaSpec::Named(NamedBeta::Nishimori));
        let b: BetaSpec = serde_json::from_str("[0.1, 0.2]").unwrap();
        assert_eq!(b, BetaSpec::Ladder(vec![0.1, 0.2]));
    }
}
