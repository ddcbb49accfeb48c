//! Thresholds of dual pairs are tied by H(p) + H(p*) = 1.
//!
//! cargo run --example entropy_duality

use toric_threshold::duality::{entropy_duality, self_dual_threshold};
use toric_threshold::models::ModelKind;

fn main() -> toric_threshold::Result<()> {
    println!("{:<6} {:>8} {:<6} {:>8} {:>8}", "model", "p_c", "dual", "p_c*", "H+H*");
    for (kind, p_c) in [
        (ModelKind::Rbim3, 0.233),
        (ModelKind::Rpgm3, 0.033),
        (ModelKind::Rcgm4, 0.29),
        (ModelKind::Rbim4, 0.019),
    ] {
        let e = entropy_duality(p_c)?;
        println!(
            "{:<6} {:>8.4} {:<6} {:>8.4} {:>8.5}",
            kind.name(),
            e.p_c,
            kind.dual().name(),
            e.dual_p_c,
            e.entropy + e.dual_entropy
        );
    }
    println!("self-dual point H(p) = 1/2 at p = {:.5}", self_dual_threshold());
    Ok(())
}
