//! On the Nishimori line the disorder-averaged energy per term is exactly
//! -(1 - 2p); a short Monte Carlo run reproduces it for each model.
//!
//! cargo run --release --example nishimori_line

use std::sync::Arc;

use toric_threshold::lattice::CellComplex;
use toric_threshold::mc::{self, McConfig};
use toric_threshold::models::{nishimori_beta, ModelKind, SpinModel};

fn main() -> toric_threshold::Result<()> {
    let p = 0.08;
    println!("p = {p}, beta_N = {:.4}, exact overlap {:.4}", nishimori_beta(p)?, 1.0 - 2.0 * p);
    for kind in ModelKind::ALL {
        let l = if kind.dim() == 3 { 4 } else { 3 };
        let model = SpinModel::build(kind, Arc::new(CellComplex::torus(kind.dim(), l)?))?;
        let cfg = McConfig {
            thermalization: 200,
            measurements: 400,
            interval: 4,
            betas: vec![nishimori_beta(p)?],
            seed: 5,
            samples: 32,
            ..McConfig::default()
        };
        let runs = mc::run_ensemble(&model, p, None, &cfg)?;
        let avg = mc::disorder_average(&mc::rung_series(&runs, 0), "overlap")?;
        println!(
            "{kind:<6} L={l}: {:.4} ± {:.4}  ({:+.1} sigma)",
            avg.mean,
            avg.stderr,
            (avg.mean - (1.0 - 2.0 * p)) / avg.stderr
        );
    }
    Ok(())
}
