//! Perimeter, area and volume laws of Wilson loops and surfaces, from exact
//! enumeration and from Monte Carlo.
//!
//! cargo run --release --example wilson_laws

use std::sync::Arc;

use toric_threshold::analysis::{fit_loop_law, fit_surface_law, WilsonMean};
use toric_threshold::exact::{enumerate, EnumerationBudget};
use toric_threshold::lattice::CellComplex;
use toric_threshold::mc::{self, McConfig};
use toric_threshold::models::{DisorderSample, ModelKind, SpinModel};

fn main() -> toric_threshold::Result<()> {
    // a flat slab of the plaquette model: loops decay with tanh(beta)^area
    let beta = 0.3;
    let model = SpinModel::build(ModelKind::Rpgm3, Arc::new(CellComplex::open_box(&[4, 4, 1])?))?;
    let mut index = Vec::new();
    let mut sets = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            let s = mc::wilson_loop_sets(&model, a, b)?;
            index.push((a, b, sets.len(), s.len()));
            sets.extend(s);
        }
    }
    let clean = DisorderSample::uniform(model.n_terms());
    let ex = enumerate(&model, &clean, &EnumerationBudget::default(), &sets)?.expectations(beta);
    let means: Vec<WilsonMean> = index
        .iter()
        .map(|&(a, b, start, n)| WilsonMean::new(&[a, b], ex[start..start + n].iter().sum::<f64>() / n as f64, 0.0))
        .collect();
    let fit = fit_loop_law(&means)?;
    println!(
        "RPGM3 slab, beta {beta}: {:?} law, area {:.4} (-ln tanh = {:.4}), perimeter {:.4}",
        fit.law,
        fit.area.value,
        -beta.tanh().ln(),
        fit.perimeter.value
    );

    // the 2-form model on both sides of its transition near beta = 0.95
    let model = SpinModel::build(ModelKind::Rcgm4, Arc::new(CellComplex::torus(4, 4)?))?;
    let boxes: Vec<(usize, usize, usize)> = (1..=3)
        .flat_map(|a| (1..=3).flat_map(move |b| (1..=3).map(move |c| (a, b, c))))
        .collect();
    for beta in [0.8, 1.2] {
        let cfg = McConfig {
            thermalization: 200,
            measurements: 400,
            interval: 4,
            betas: vec![beta],
            seed: 3,
            samples: 4,
            surfaces: boxes.clone(),
            ..McConfig::default()
        };
        let runs = mc::run_ensemble(&model, 0.0, None, &cfg)?;
        let series = mc::rung_series(&runs, 0);
        let means = boxes
            .iter()
            .map(|&(a, b, c)| {
                let avg = mc::disorder_average(&series, &mc::surface_column(a, b, c))?;
                Ok(WilsonMean::new(&[a, b, c], avg.mean, avg.stderr))
            })
            .collect::<toric_threshold::Result<Vec<_>>>()?;
        match fit_surface_law(&means) {
            Ok(f) => {
                let v = f.volume.expect("surface fits carry a volume term");
                println!(
                    "RCGM4 at beta {beta}: {:?} law, volume {:.2e} ± {:.1e}, area {:.2e} ± {:.1e}",
                    f.law, v.value, v.sigma, f.area.value, f.area.sigma
                );
            }
            // only reached when every size averages to noise
            Err(e) => println!("RCGM4 at beta {beta}: {e}"),
        }
    }
    Ok(())
}
