//! The three ways to a threshold: self-duality, a reference value mapped
//! through the entropy relation, and a Binder crossing along the Nishimori
//! line.
//!
//! cargo run --release --example threshold_pipeline

use toric_threshold::mc::SweepOrder;
use toric_threshold::models::ModelKind;
use toric_threshold::pipeline::{threshold_pipeline, NishimoriSweep, ThresholdConfig};

fn main() -> toric_threshold::Result<()> {
    let r = threshold_pipeline(&ThresholdConfig::self_dual(ModelKind::Rpgm4))?;
    println!("{} self-dual: p* = {:.4}", r.model, r.p_c);

    let r = threshold_pipeline(&ThresholdConfig::reference(ModelKind::Rcgm4, 0.29))?;
    println!("{} reference {:.3} -> {} {:.4}", r.model, r.p_c, r.dual_model, r.dual_p_c);

    let sweep = NishimoriSweep {
        sizes: vec![3, 4, 5],
        p: vec![0.20, 0.22, 0.24, 0.26, 0.28],
        seed: 9,
        samples: 48,
        thermalization: 200,
        measurements: 400,
        interval: 1,
        order: SweepOrder::Sequential,
        bootstrap: 200,
    };
    let r = threshold_pipeline(&ThresholdConfig::sweep(ModelKind::Rbim3, sweep))?;
    println!(
        "{} sweep: p_c = {:.4} ± {:.4} -> {} {:.4} ± {:.4}",
        r.model, r.p_c, r.p_c_sigma, r.dual_model, r.dual_p_c, r.dual_p_c_sigma
    );
    Ok(())
}
