//! Binder-cumulant crossing of the clean 3D Ising model, located with a
//! tempered temperature ladder, then mapped through the duality to the
//! plaquette gauge model.
//!
//! cargo run --release --example binder_crossing

use toric_threshold::duality::kw_dual_coupling;
use toric_threshold::mc::{InitialState, SweepOrder};
use toric_threshold::models::ModelKind;
use toric_threshold::pipeline::{mc_sweep, SweepAxis, SweepConfig};

fn main() -> toric_threshold::Result<()> {
    let cfg = SweepConfig {
        model: ModelKind::Rbim3,
        sizes: vec![4, 6, 8],
        axis: SweepAxis::Beta {
            p: 0.0,
            betas: vec![0.212, 0.216, 0.220, 0.224, 0.228, 0.232],
        },
        seed: 2024,
        samples: 16,
        thermalization: 2_000,
        measurements: 20_000,
        interval: 2,
        order: SweepOrder::Sequential,
        init: InitialState::Hot,
        tempering: true,
        bootstrap: 200,
    };
    let out = mc_sweep(&cfg)?;
    println!("{:>3} {:>7} {:>8}", "L", "beta", "binder");
    for pt in &out.points {
        println!("{:>3} {:>7.3} {:>8.4}", pt.size, pt.beta, pt.binder.unwrap_or(f64::NAN));
    }
    let est = out.crossing(cfg.bootstrap, cfg.seed)?;
    for p in &est.pairs {
        println!("L={} vs L={}: crossing at {:.4}", p.sizes.0, p.sizes.1, p.x);
    }
    println!("beta_c = {:.4} ± {:.4}", est.x_c, est.sigma);
    println!("dual coupling = {:.4}", kw_dual_coupling(est.x_c)?);
    Ok(())
}
