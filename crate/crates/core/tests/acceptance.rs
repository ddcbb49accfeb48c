//! End-to-end acceptance checks, one verdict line per criterion.
//!
//! Runs without the libtest harness so the verdicts always reach stdout:
//! `cargo test --test acceptance` (optionally followed by criterion numbers).

use std::panic;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_threshold::analysis::{fit_loop_law, fit_surface_law, WilsonMean};
use toric_threshold::duality::{derive_dual_model, dual_critical_p, kw_dual_coupling, self_dual_coupling, self_dual_threshold};
use toric_threshold::exact::{class_probabilities_from_model, enumerate, exact_class_probabilities, mc_distribution_check, EnumerationBudget};
use toric_threshold::homology::HomologyBasis;
use toric_threshold::lattice::{CellComplex, Chain};
use toric_threshold::mc::{self, ChainState, InitialState, McConfig, Metropolis, SweepOrder};
use toric_threshold::models::{nishimori_beta, DisorderSample, ModelKind, SpinModel};
use toric_threshold::pipeline::{self, mc_sweep, NishimoriSweep, SweepAxis, SweepConfig, ThresholdConfig};
use toric_threshold::toric::{Sector, ToricCode3D};

type Verdict = Result<String, String>;

fn check(cond: bool, detail: String) -> Verdict {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn torus(kind: ModelKind, l: usize) -> SpinModel {
    SpinModel::build(kind, Arc::new(CellComplex::torus(kind.dim(), l).unwrap())).unwrap()
}

fn open(kind: ModelKind, lengths: &[usize]) -> SpinModel {
    SpinModel::build(kind, Arc::new(CellComplex::open_box(lengths).unwrap())).unwrap()
}

/// Entropy-relation values for the thresholds in the model table.
fn criterion_1() -> Verdict {
    let a = dual_critical_p(0.233).unwrap();
    let b = dual_critical_p(0.28).unwrap();
    let s = self_dual_threshold();
    check(
        (0.030..=0.037).contains(&a) && (0.018..=0.024).contains(&b) && (s - 0.1100).abs() <= 0.0005,
        format!("p~(0.233) = {a:.4}, p~(0.28) = {b:.4}, p* = {s:.4}"),
    )
}

/// Structural duals by canonical incidence hashing.
fn criterion_2() -> Verdict {
    let expected = [
        (ModelKind::Rbim3, ModelKind::Rpgm3),
        (ModelKind::Rpgm3, ModelKind::Rbim3),
        (ModelKind::Rpgm4, ModelKind::Rpgm4),
        (ModelKind::Rcgm4, ModelKind::Rbim4),
        (ModelKind::Rbim4, ModelKind::Rcgm4),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, dual) in expected {
        let m = torus(kind, 3);
        let (d, report) = derive_dual_model(&m).unwrap();
        let good = report.isomorphic && d.kind() == dual && report.witness_hash == report.dual_hash;
        ok &= good;
        parts.push(format!("{kind}->{}", d.kind()));
    }
    check(ok, parts.join(", "))
}

/// Class probabilities by counting errors versus normalized partition
/// functions on the L=2 code.
fn criterion_3() -> Verdict {
    let code = ToricCode3D::new(2).unwrap();
    let budget = EnumerationBudget::default();
    let mut worst = 0.0f64;
    let mut n = 0;
    for (i, p) in [0.05, 0.08, 0.12].into_iter().enumerate() {
        for seed in 0..20u64 {
            let e = code.sample_sector_error(Sector::Z, p, 1000 * i as u64 + seed).unwrap();
            let s = code.static_syndrome(&e, Sector::Z).unwrap();
            let counted = exact_class_probabilities(&code, &s, Sector::Z, p).unwrap();
            let model = class_probabilities_from_model(&code, &s, Sector::Z, p, &budget).unwrap();
            for (a, b) in counted.iter().zip(&model) {
                worst = worst.max((a - b).abs());
            }
            n += 1;
        }
    }
    check(worst <= 1e-10, format!("{n} syndromes, max |difference| = {worst:.2e}"))
}

/// Disorder-averaged energy on the Nishimori line.
fn criterion_4() -> Verdict {
    let mut ok = true;
    let mut worst = 0.0f64;
    for kind in ModelKind::ALL {
        let l = if kind.dim() == 3 { 4 } else { 3 };
        let model = torus(kind, l);
        for p in [0.05, 0.10] {
            let cfg = McConfig {
                thermalization: 200,
                measurements: 400,
                interval: 4,
                betas: vec![nishimori_beta(p).unwrap()],
                seed: 41,
                samples: 50,
                ..McConfig::default()
            };
            let runs = mc::run_ensemble(&model, p, None, &cfg).unwrap();
            let avg = mc::disorder_average(&mc::rung_series(&runs, 0), "overlap").unwrap();
            let z = (avg.mean - (1.0 - 2.0 * p)).abs() / avg.stderr;
            worst = worst.max(z);
            if z > 3.0 {
                ok = false;
                eprintln!("  {kind} p={p}: {:.5} ± {:.5}, expected {}", avg.mean, avg.stderr, 1.0 - 2.0 * p);
            }
        }
    }
    check(ok, format!("10 (kind, p) cases, largest deviation {worst:.2} sigma"))
}

fn betti(cx: &CellComplex, k: usize) -> usize {
    let n = cx.count(k);
    let rk = |j: usize| {
        if j == 0 || j > cx.dim() {
            0
        } else {
            cx.boundary_matrix(j).unwrap().rank()
        }
    };
    n - rk(k) - rk(k + 1)
}

/// Chain-complex and homology identities.
fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shapes = [
        CellComplex::torus(3, 3).unwrap(),
        CellComplex::torus(3, 4).unwrap(),
        CellComplex::torus(4, 3).unwrap(),
        CellComplex::open_box(&[3, 4, 2]).unwrap(),
        CellComplex::open_box(&[3, 2, 3, 2]).unwrap(),
    ];
    for cx in &shapes {
        for k in 2..=cx.dim() {
            for _ in 0..1000 {
                let c = Chain::from_indices(k, cx.count(k), (0..cx.count(k)).filter(|_| rng.gen_bool(0.5)));
                if !cx.boundary(&cx.boundary(&c).unwrap()).unwrap().is_empty() {
                    return Err(format!("boundary of boundary nonzero on {:?} rank {k}", cx.lengths()));
                }
            }
        }
    }
    let t3 = &shapes[1];
    let t4 = &shapes[2];
    let euler = shapes[..3].iter().all(|c| c.euler_characteristic() == 0);
    let b3 = (betti(t3, 1), betti(t3, 2));
    let b4 = (betti(t4, 1), betti(t4, 2));
    // class labels add under chain addition
    let mut additive = true;
    for (cx, k) in [(t3, 1), (t3, 2), (t4, 1), (t4, 2)] {
        let h = HomologyBasis::new(cx, k).unwrap();
        let random_cycle = |rng: &mut ChaCha8Rng| {
            let label: u32 = rng.gen_range(0..1 << h.len());
            let mut z = h.representative_of(label);
            let up = Chain::from_indices(k + 1, cx.count(k + 1), (0..cx.count(k + 1)).filter(|_| rng.gen_bool(0.3)));
            z.add_assign(&cx.boundary(&up).unwrap());
            (z, label)
        };
        for _ in 0..200 {
            let (a, la) = random_cycle(&mut rng);
            let (b, lb) = random_cycle(&mut rng);
            let sum = &a + &b;
            additive &= h.classify(cx, &a).unwrap() == la
                && h.classify(cx, &sum).unwrap() == h.classify(cx, &a).unwrap() ^ h.classify(cx, &b).unwrap()
                && h.classify(cx, &sum).unwrap() == la ^ lb;
        }
    }
    check(
        euler && b3 == (3, 3) && b4 == (4, 6) && additive,
        format!("Euler 0: {euler}, Betti 3D {b3:?}, 4D {b4:?}, labels additive: {additive}"),
    )
}

/// Energy and Wilson observables under random gauge transformations.
fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases: [(ModelKind, usize, Vec<Vec<u32>>); 3] = {
        let m3 = torus(ModelKind::Rpgm3, 4);
        let m4 = torus(ModelKind::Rpgm4, 3);
        let c4 = torus(ModelKind::Rcgm4, 3);
        let loops3 = [mc::wilson_loop_sets(&m3, 1, 1).unwrap(), mc::wilson_loop_sets(&m3, 2, 3).unwrap()].concat();
        let loops4 = [mc::wilson_loop_sets(&m4, 1, 2).unwrap(), mc::wilson_loop_sets(&m4, 2, 2).unwrap()].concat();
        let surf = [mc::wilson_surface_sets(&c4, 1, 1, 1).unwrap(), mc::wilson_surface_sets(&c4, 1, 2, 2).unwrap()].concat();
        [(ModelKind::Rpgm3, 4, loops3), (ModelKind::Rpgm4, 3, loops4), (ModelKind::Rcgm4, 3, surf)]
    };
    let mut transforms = 0;
    for (kind, l, sets) in cases {
        let model = torus(kind, l);
        let gens = model.gauge_generators().unwrap();
        let d = DisorderSample::sample(&model, 0.15, 9).unwrap();
        let mut st = ChainState::hot(&model, &d, &mut rng).unwrap();
        let kernel = Metropolis::new(&model, 0.5);
        for step in 0..10_000 {
            if step % 100 == 0 {
                kernel.sweep(&mut st, SweepOrder::RandomSite, &mut rng);
            }
            let e0 = model.energy(&st.spins, &d).unwrap();
            let w0: Vec<i8> = sets.iter().map(|s| mc::product(&st.spins, s)).collect();
            for _ in 0..rng.gen_range(1..4) {
                let g = &gens[rng.gen_range(0..gens.len())];
                st.flip_set(&model, g);
            }
            let e1 = model.energy(&st.spins, &d).unwrap();
            let w1: Vec<i8> = sets.iter().map(|s| mc::product(&st.spins, s)).collect();
            if e0 != e1 || w0 != w1 || st.energy(1.0) != e1 {
                return Err(format!("{kind}: invariance broken at transformation {step}"));
            }
            transforms += 1;
        }
    }
    Ok(format!("{transforms} transformations on RPGM3/RPGM4/RCGM4, energy and Wilson values unchanged"))
}

/// Empirical Metropolis distributions versus exact Boltzmann weights.
fn criterion_7() -> Verdict {
    let instances = [
        (ModelKind::Rbim3, vec![2, 2, 2]),
        (ModelKind::Rpgm3, vec![3, 2, 2]),
        (ModelKind::Rpgm4, vec![2, 2, 2, 1]),
        (ModelKind::Rcgm4, vec![2, 2, 2, 2]),
        (ModelKind::Rbim4, vec![2, 2, 2, 1]),
    ];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (i, (kind, lengths)) in instances.into_iter().enumerate() {
        let model = open(kind, &lengths);
        let d = DisorderSample::sample(&model, 0.2, 70 + i as u64).unwrap();
        for order in [SweepOrder::Sequential, SweepOrder::RandomSite] {
            for tempering in [false, true] {
                let betas = if tempering { vec![0.2, 0.35, 0.5] } else { vec![0.5] };
                let rung = betas.len() - 1;
                let cfg = McConfig {
                    thermalization: 1_000,
                    measurements: 300_000,
                    interval: 1,
                    betas,
                    seed: 0,
                    samples: 1,
                    order,
                    tempering,
                    init: InitialState::Hot,
                    ..McConfig::default()
                };
                let mut states: Vec<Vec<i8>> = Vec::with_capacity(cfg.measurements);
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + cases);
                mc::run_chain_visiting(&model, &d, &cfg, &mut rng, rung, |s| states.push(s.to_vec())).unwrap();
                let tv = mc_distribution_check(&model, &d, 0.5, states.iter().map(|s| s.as_slice())).unwrap();
                if tv >= 0.02 {
                    eprintln!("  {kind} {order:?} tempering={tempering}: TV {tv:.4}");
                }
                worst = worst.max(tv);
                cases += 1;
            }
        }
    }
    check(worst < 0.02, format!("{cases} chains, largest TV distance {worst:.4}"))
}

/// Clean 3D Ising critical coupling from Binder crossings.
fn criterion_8() -> Verdict {
    let cfg = SweepConfig {
        model: ModelKind::Rbim3,
        sizes: vec![4, 6, 8],
        axis: SweepAxis::Beta {
            p: 0.0,
            betas: vec![0.212, 0.216, 0.220, 0.224, 0.228, 0.232],
        },
        seed: 2024,
        samples: 8,
        thermalization: 2_000,
        measurements: 12_000,
        interval: 2,
        order: SweepOrder::Sequential,
        init: InitialState::Hot,
        tempering: true,
        bootstrap: 200,
    };
    let out = mc_sweep(&cfg).unwrap();
    let est = out.crossing(cfg.bootstrap, cfg.seed).unwrap();
    let dual = kw_dual_coupling(est.x_c).unwrap();
    check(
        (est.x_c - 0.2217).abs() <= 0.005 && (dual - 0.761).abs() <= 0.02,
        format!("beta_c = {:.4} ± {:.4}, dual coupling {dual:.4} (self-dual point {:.4})", est.x_c, est.sigma, self_dual_coupling()),
    )
}

/// RBIM4 Nishimori crossing, inferred RCGM4 threshold, self-dual RPGM4.
fn criterion_9() -> Verdict {
    let cfg = ThresholdConfig::sweep(
        ModelKind::Rbim4,
        NishimoriSweep {
            sizes: vec![3, 4, 5],
            p: vec![0.25, 0.265, 0.28, 0.295, 0.31],
            seed: 7,
            samples: 200,
            thermalization: 1_000,
            measurements: 2_000,
            interval: 2,
            order: SweepOrder::Sequential,
            bootstrap: 200,
        },
    );
    let r = pipeline::threshold_pipeline(&cfg).unwrap();
    let sd = pipeline::threshold_pipeline(&ThresholdConfig::self_dual(ModelKind::Rpgm4)).unwrap();
    let a = (r.p_c - 0.28).abs() <= 0.03;
    let b = r.dual_model == ModelKind::Rcgm4 && (r.dual_p_c - 0.02).abs() <= 0.003;
    let c = (sd.p_c - 0.1100).abs() <= 0.0005;
    check(
        a && b && c,
        format!(
            "(a) RBIM4 p_c = {:.4} ± {:.4}; (b) RCGM4 p_c = {:.4} ± {:.4}; (c) RPGM4 p* = {:.4}",
            r.p_c, r.p_c_sigma, r.dual_p_c, r.dual_p_c_sigma, sd.p_c
        ),
    )
}

/// Law-fit extractors on synthetic, exact and simulated inputs.
fn criterion_10() -> Verdict {
    // synthetic inputs of exponential form
    let mut synthetic_ok = true;
    let mut loops = Vec::new();
    for a in 1..=4usize {
        for b in 1..=4usize {
            let (x, y) = (a as f64, b as f64);
            loops.push(WilsonMean::new(&[a, b], (-0.17 * x * y - 0.04 * 2.0 * (x + y) - 0.1).exp(), 0.0));
        }
    }
    let f = fit_loop_law(&loops).unwrap();
    synthetic_ok &= (f.area.value - 0.17).abs() < 1e-12 && (f.perimeter.value - 0.04).abs() < 1e-12;
    let mut boxes = Vec::new();
    for a in 1..=3usize {
        for b in 1..=3usize {
            for c in 1..=3usize {
                let (x, y, z) = (a as f64, b as f64, c as f64);
                let v = -0.08 * x * y * z - 0.03 * 2.0 * (x * y + y * z + z * x);
                boxes.push(WilsonMean::new(&[a, b, c], v.exp(), 0.0));
            }
        }
    }
    let f = fit_surface_law(&boxes).unwrap();
    synthetic_ok &= (f.volume.unwrap().value - 0.08).abs() < 1e-12 && (f.area.value - 0.03).abs() < 1e-12;

    // exact loop means of the clean gauge model on a flat open slab
    let beta = 0.3;
    let model = open(ModelKind::Rpgm3, &[4, 4, 1]);
    let mut sizes = Vec::new();
    let mut sets = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            let s = mc::wilson_loop_sets(&model, a, b).unwrap();
            sizes.push((a, b, sets.len(), s.len()));
            sets.extend(s);
        }
    }
    let hist = enumerate(&model, &DisorderSample::uniform(model.n_terms()), &EnumerationBudget::default(), &sets).unwrap();
    let ex = hist.expectations(beta);
    let means: Vec<WilsonMean> = sizes
        .iter()
        .map(|&(a, b, start, n)| WilsonMean::new(&[a, b], ex[start..start + n].iter().sum::<f64>() / n as f64, 0.0))
        .collect();
    let fit = fit_loop_law(&means).unwrap();
    let target = -beta.tanh().ln();
    let rel = (fit.area.value - target).abs() / target;

    // Deep in the ordered phase of the clean 2-form model. Its transition is
    // the image of the 4D Ising point, beta ~ 0.95, so twice the self-dual
    // coupling (0.88) still sits in the crossover on L = 4; it is reported
    // but the check runs at beta = 1.2.
    let model = torus(ModelKind::Rcgm4, 4);
    let mut surfaces = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                surfaces.push((a, b, c));
            }
        }
    }
    let volume_at = |beta: f64| {
        let cfg = McConfig {
            thermalization: 200,
            measurements: 1000,
            interval: 4,
            betas: vec![beta],
            seed: 10,
            samples: 8,
            surfaces: surfaces.clone(),
            ..McConfig::default()
        };
        let runs = mc::run_ensemble(&model, 0.0, None, &cfg).unwrap();
        let series = mc::rung_series(&runs, 0);
        let means: Vec<WilsonMean> = surfaces
            .iter()
            .map(|&(a, b, c)| {
                let avg = mc::disorder_average(&series, &mc::surface_column(a, b, c)).unwrap();
                WilsonMean::new(&[a, b, c], avg.mean, avg.stderr)
            })
            .collect();
        fit_surface_law(&means).map(|f| f.volume.unwrap())
    };
    let vol = volume_at(1.2).unwrap();
    let crossover = match volume_at(2.0 * self_dual_coupling()) {
        Ok(v) => format!("{:.3} ± {:.3}", v.value, v.sigma),
        Err(e) => e.to_string(),
    };
    check(
        synthetic_ok && rel <= 0.10 && vol.value.abs() <= 3.0 * vol.sigma,
        format!(
            "synthetic exact: {synthetic_ok}; area {:.4} vs {target:.4} ({:.1e} rel); \
             ordered volume {:.2e} ± {:.2e} (at 2x self-dual: {crossover})",
            fit.area.value, rel, vol.value, vol.sigma
        ),
    )
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    type Criterion = (usize, &'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        (1, "entropy duality of the threshold table", criterion_1),
        (2, "structural duals", criterion_2),
        (3, "class probabilities = partition functions", criterion_3),
        (4, "Nishimori energy identity", criterion_4),
        (5, "homology and topology", criterion_5),
        (6, "gauge invariance", criterion_6),
        (7, "Monte Carlo vs exact distribution", criterion_7),
        (8, "clean Ising critical point", criterion_8),
        (9, "4D thresholds", criterion_9),
        (10, "law-fit extractors", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, title, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let verdict = panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(d) => println!("criterion {n:>2} PASS  {title}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {title}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
