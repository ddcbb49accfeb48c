use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use toric_threshold::duality::{derive_dual_model, dual_critical_p, kw_dual_coupling, shannon_entropy};
use toric_threshold::exact::{class_probabilities_from_model, exact_class_probabilities, kw_prefactor_check, EnumerationBudget};
use toric_threshold::homology::{betti_numbers, HomologyBasis};
use toric_threshold::io::{self, ChainFormat, ChainHeader};
use toric_threshold::lattice::CellComplex;
use toric_threshold::models::{nishimori_beta, DisorderSample, ModelKind, SpinModel};
use toric_threshold::pipeline::{self, Command, CommandOutput, LatticeSpec};
use toric_threshold::toric::{NoiseParams, Sector, TimeBoundary, ToricCode3D};
use toric_threshold::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Random spin models for 3D toric-code thresholds")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Cell complexes.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Toric-code errors and their spin-model images.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Monte Carlo runs and sweeps.
    #[command(subcommand)]
    Mc(McCmd),
    /// Exact enumeration checks.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// Dual models and dual critical points.
    #[command(subcommand)]
    Duality(DualityCmd),
    /// Threshold estimates.
    #[command(subcommand)]
    Threshold(ThresholdCmd),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Cell counts, Euler characteristic and Betti numbers.
    Info {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, short)]
        l: usize,
        #[arg(long)]
        open: bool,
    },
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long, short)]
    l: usize,
    #[arg(long, short)]
    p: f64,
    /// Measurement error rate (defaults to p).
    #[arg(long, short)]
    q: Option<f64>,
    /// Noisy rounds; 0 means a single perfect measurement.
    #[arg(long, default_value_t = 0)]
    rounds: usize,
    #[arg(long, default_value = "z")]
    sector: Sector,
    #[arg(long)]
    periodic_time: bool,
    #[arg(long)]
    seed: u64,
}

impl NoiseArgs {
    fn noise(&self) -> Result<NoiseParams> {
        // A perfect single measurement reads only the rates, so any round count validates them.
        let mut n = NoiseParams::new(self.p, self.rounds.max(1), self.sector)?;
        if let Some(q) = self.q {
            n = n.with_q(q)?;
        }
        if self.periodic_time {
            n = n.with_time(TimeBoundary::Periodic)?;
        }
        Ok(n)
    }
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Samples an error chain and prints it with a header.
    Sample {
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value = "indices")]
        format: ChainFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples an error and reports the disordered spin model it maps to.
    Map {
        #[command(flatten)]
        noise: NoiseArgs,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured number of disorder samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum McCmd {
    /// One model at one error rate; writes series CSV plus a JSON manifest.
    Run(ConfigArgs),
    /// Several sizes along an axis; writes a summary CSV plus a JSON manifest.
    Sweep(ConfigArgs),
    /// Reruns a manifest and checks the output hash.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExactCheckMode {
    /// ln Z of a small instance.
    Partition {
        #[arg(long)]
        kind: ModelKind,
        /// Comma-separated axis lengths.
        #[arg(long, value_delimiter = ',')]
        lengths: Vec<usize>,
        #[arg(long)]
        open: bool,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        budget_bits: u32,
    },
    /// Class probabilities by error counting versus partition functions.
    Mapping {
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "z")]
        sector: Sector,
        #[arg(long)]
        seed: u64,
    },
    /// Exact duality identity on an open box at zero disorder.
    Kw {
        #[arg(long)]
        kind: ModelKind,
        #[arg(long, value_delimiter = ',')]
        lengths: Vec<usize>,
        #[arg(long)]
        beta: f64,
    },
}

#[derive(Subcommand)]
enum ExactCmd {
    Check {
        #[command(subcommand)]
        mode: ExactCheckMode,
    },
}

#[derive(Subcommand)]
enum DualityCmd {
    /// Dual kind, dual critical rate and dual coupling.
    Solve {
        #[arg(long)]
        model: ModelKind,
        /// Critical error rate of the model.
        #[arg(long)]
        p_c: Option<f64>,
        /// Coupling beta*J to map.
        #[arg(long)]
        beta: Option<f64>,
        /// Also verify the structural dual on a torus of this size.
        #[arg(long)]
        verify_l: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ThresholdCmd {
    Run(ConfigArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        // a closed pipe (`| head`) is not a failure of the command
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    pipeline::parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.verb {
        Verb::Lattice(LatticeCmd::Info { dim, l, open }) => {
            let spec = LatticeSpec {
                lengths: vec![l; dim],
                open,
            };
            let cx = spec.build()?;
            let betti: Vec<usize> = if cx.is_fully_periodic() {
                (0..=dim).map(|k| HomologyBasis::new(&cx, k).map(|h| h.len())).collect::<Result<_>>()?
            } else {
                betti_numbers(&cx)?
            };
            print_json(&json!({
                "dim": dim,
                "lengths": cx.lengths(),
                "periodic": cx.is_fully_periodic(),
                "cells": cx.counts(),
                "euler_characteristic": cx.euler_characteristic(),
                "betti": betti,
            }))
        }
        Verb::Code(cmd) => code(cmd),
        Verb::Mc(cmd) => mc(cmd),
        Verb::Exact(ExactCmd::Check { mode }) => exact(mode),
        Verb::Duality(DualityCmd::Solve { model, p_c, beta, verify_l }) => {
            if p_c.is_none() && beta.is_none() && verify_l.is_none() {
                return Err(Error::Config("give --p-c, --beta or --verify-l".into()));
            }
            let dual_p_c = p_c.map(dual_critical_p).transpose()?;
            let couplings = beta
                .map(|b| Ok::<_, Error>(json!({"beta": b, "dual_beta": kw_dual_coupling(b)?})))
                .transpose()?;
            let structure = verify_l
                .map(|l| {
                    let m = SpinModel::build(model, Arc::new(CellComplex::torus(model.dim(), l)?))?;
                    derive_dual_model(&m).map(|(_, r)| json!({"isomorphic": r.isomorphic, "hash": r.dual_hash}))
                })
                .transpose()?;
            print_json(&json!({
                "input_kind": model,
                "dual_kind": model.dual(),
                "p_c": p_c,
                "dual_p_c": dual_p_c,
                "entropy": p_c.map(shannon_entropy).transpose()?,
                "couplings": couplings,
                "structure": structure,
            }))
        }
        Verb::Threshold(ThresholdCmd::Run(args)) => {
            let mut cfg: pipeline::ThresholdConfig = read_config(&args.config)?;
            if let Some(sw) = cfg.sweep.as_mut() {
                if let Some(s) = args.seed {
                    sw.seed = s;
                }
                if let Some(n) = args.samples {
                    sw.samples = n;
                }
            }
            execute(Command::Threshold(cfg), &args.out, "threshold")
        }
    }
}

/// Runs a command, writes its outputs and manifest, and prints a summary.
fn execute(cmd: Command, out: &Path, stem: &str) -> Result<()> {
    fs::create_dir_all(out)?;
    let output = cmd.execute()?;
    let manifest = cmd.manifest(&output)?;
    match &output {
        CommandOutput::McRun(o) => {
            let csv = out.join(format!("{stem}.csv"));
            io::write_series_csv(&csv, &o.runs)?;
            io::write_json(&io::sidecar_path(&csv), &manifest)?;
            io::write_json(&out.join(format!("{stem}_summary.json")), &o.summary)?;
            print_json(&o.summary)?;
        }
        CommandOutput::McSweep(o) => {
            let csv = out.join(format!("{stem}.csv"));
            write_sweep_csv(&csv, &o.points)?;
            io::write_json(&io::sidecar_path(&csv), &manifest)?;
            print_json(&o.points)?;
        }
        CommandOutput::Threshold(r) => {
            io::write_json(&out.join(format!("{stem}_report.json")), r)?;
            io::write_json(&out.join(format!("{stem}_manifest.json")), &manifest)?;
            if !r.points.is_empty() {
                write_sweep_csv(&out.join(format!("{stem}_points.csv")), &r.points)?;
            }
            print_json(&json!({
                "model": r.model,
                "dual_model": r.dual_model,
                "method": r.method,
                "p_c": r.p_c,
                "p_c_sigma": r.p_c_sigma,
                "dual_p_c": r.dual_p_c,
                "dual_p_c_sigma": r.dual_p_c_sigma,
            }))?;
        }
    }
    Ok(())
}

fn write_sweep_csv(path: &Path, points: &[pipeline::SweepPoint]) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::Precondition("empty sweep".into()));
    };
    let cols: Vec<String> = first.means.keys().cloned().collect();
    let mut header = vec!["L".to_string(), "x".into(), "p".into(), "beta".into(), "samples".into(), "binder".into()];
    for c in &cols {
        header.push(c.clone());
        header.push(format!("{c}_err"));
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|pt| {
            let mut r = vec![pt.size as f64, pt.x, pt.p, pt.beta, pt.samples as f64, pt.binder.unwrap_or(f64::NAN)];
            for c in &cols {
                let (m, e) = pt.means.get(c).copied().unwrap_or((f64::NAN, f64::NAN));
                r.push(m);
                r.push(e);
            }
            r
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    io::write_table_csv(path, &header_refs, &rows)
}

fn code(cmd: CodeCmd) -> Result<()> {
    match cmd {
        CodeCmd::Sample { noise, format, out } => {
            let code = ToricCode3D::new(noise.l)?;
            let params = noise.noise()?;
            let (header, chain, summary) = if noise.rounds == 0 {
                let e = code.sample_sector_error(noise.sector, noise.p, noise.seed)?;
                let syndrome = code.static_syndrome(&e, noise.sector)?;
                let summary = json!({
                    "weight": e.weight(),
                    "syndrome_weight": syndrome.weight(),
                    "relative_class": code.relative_label(&e, noise.sector)?,
                });
                let header = ChainHeader {
                    l: noise.l,
                    rounds: 0,
                    sector: noise.sector,
                    time: params.time,
                    rank: e.rank(),
                    cells: e.len(),
                    format,
                };
                (header, e, summary)
            } else {
                let st = code.spacetime(&params)?;
                let e = st.sample_error(&params, noise.seed)?;
                let h = st.detection_events(&e)?;
                let summary = json!({
                    "weight": e.chain.weight(),
                    "events": h.events.weight(),
                    "final_syndrome_weight": h.final_syndrome.weight(),
                });
                let header = ChainHeader {
                    l: noise.l,
                    rounds: noise.rounds,
                    sector: noise.sector,
                    time: params.time,
                    rank: e.chain.rank(),
                    cells: e.chain.len(),
                    format,
                };
                (header, e.chain, summary)
            };
            let text = io::format_spacetime_chain(&header, &chain)?;
            match out {
                Some(path) => {
                    fs::write(&path, text)?;
                    print_json(&summary)
                }
                None => emit(&text),
            }
        }
        CodeCmd::Map { noise } => {
            let code = ToricCode3D::new(noise.l)?;
            let params = noise.noise()?;
            let (model, disorder) = if noise.rounds == 0 {
                let model = code.static_model(noise.sector)?;
                let e = code.sample_sector_error(noise.sector, noise.p, noise.seed)?;
                let d = code.static_disorder(&model, &e, noise.sector)?;
                (model, d)
            } else {
                let st = code.spacetime(&params)?;
                let k = toric_threshold::toric::nishimori_anisotropy(params.p, params.q)?;
                let model = st.model(k)?;
                let e = st.sample_error(&params, noise.seed)?;
                let d = st.disorder(&model, &e)?;
                (model, d)
            };
            print_json(&json!({
                "descriptor": model.descriptor(),
                "n_spins": model.n_spins(),
                "n_terms": model.n_terms(),
                "nishimori_beta": nishimori_beta(params.p)?,
                "temporal_coupling": model.temporal_coupling(),
                "flipped_terms": disorder.n_flipped(),
                "disorder_hex": disorder.to_hex(),
            }))
        }
    }
}

fn mc(cmd: McCmd) -> Result<()> {
    match cmd {
        McCmd::Run(args) => {
            let mut cfg: pipeline::McRunConfig = read_config(&args.config)?;
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(n) = args.samples {
                cfg.samples = n;
            }
            execute(Command::McRun(cfg), &args.out, "series")
        }
        McCmd::Sweep(args) => {
            let mut cfg: pipeline::SweepConfig = read_config(&args.config)?;
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(n) = args.samples {
                cfg.samples = n;
            }
            execute(Command::McSweep(cfg), &args.out, "sweep")
        }
        McCmd::Replay { manifest } => {
            let m: pipeline::RunManifest = read_config(&manifest)?;
            let same = pipeline::replay(&m)?;
            print_json(&json!({"command": m.command, "identical": same}))?;
            if same {
                Ok(())
            } else {
                Err(Error::Precondition("replayed output differs from the manifest".into()))
            }
        }
    }
}

fn exact(mode: ExactCheckMode) -> Result<()> {
    match mode {
        ExactCheckMode::Partition { kind, lengths, open, p, beta, seed, budget_bits } => {
            let spec = LatticeSpec { lengths, open };
            let model = SpinModel::build(kind, Arc::new(spec.build()?))?;
            let d = DisorderSample::sample(&model, p, seed)?;
            let beta = match beta {
                Some(b) => b,
                None => nishimori_beta(p)?,
            };
            let budget = EnumerationBudget::new(budget_bits, true)?;
            let hist = toric_threshold::exact::enumerate(&model, &d, &budget, &[])?;
            print_json(&json!({
                "kind": kind,
                "beta": beta,
                "free_bits": hist.free_bits(),
                "gauge_rank": hist.gauge_rank(),
                "ln_z": hist.log_partition(beta),
                "overlap": hist.mean_overlap(beta),
            }))
        }
        ExactCheckMode::Mapping { l, p, sector, seed } => {
            let code = ToricCode3D::new(l)?;
            let e = code.sample_sector_error(sector, p, seed)?;
            let s = code.static_syndrome(&e, sector)?;
            let counted = exact_class_probabilities(&code, &s, sector, p)?;
            let from_model = class_probabilities_from_model(&code, &s, sector, p, &EnumerationBudget::default())?;
            let gap = counted
                .iter()
                .zip(&from_model)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            print_json(&json!({
                "counted": counted,
                "from_model": from_model,
                "max_abs_difference": gap,
            }))
        }
        ExactCheckMode::Kw { kind, lengths, beta } => {
            let model = SpinModel::build(kind, Arc::new(CellComplex::open_box(&lengths)?))?;
            let partner = model.constraint_partner()?;
            let check = kw_prefactor_check(
                &model,
                &partner,
                &DisorderSample::uniform(model.n_terms()),
                beta,
                &EnumerationBudget::default(),
            )?;
            print_json(&check)
        }
    }
}
