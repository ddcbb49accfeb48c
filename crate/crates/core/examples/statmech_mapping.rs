//! Error-class probabilities of a small toric code, counted error by error
//! and recovered from partition functions of the random-plaquette model.
//!
//! cargo run --release --example statmech_mapping

use toric_threshold::exact::{class_probabilities_from_model, exact_class_probabilities, EnumerationBudget};
use toric_threshold::toric::{Sector, ToricCode3D};

fn main() -> toric_threshold::Result<()> {
    let code = ToricCode3D::new(2)?;
    let sector = Sector::Z;
    let p = 0.08;
    let budget = EnumerationBudget::default();
    let mut max_diff = 0.0f64;
    let mut ml_correct = 0;
    let trials = 10;
    for seed in 0..trials {
        let e = code.sample_sector_error(sector, p, seed)?;
        let s = code.static_syndrome(&e, sector)?;
        let counted = exact_class_probabilities(&code, &s, sector, p)?;
        let from_z = class_probabilities_from_model(&code, &s, sector, p, &budget)?;
        for (a, b) in counted.iter().zip(&from_z) {
            max_diff = max_diff.max((a - b).abs());
        }
        // maximum-likelihood class relative to the reference error
        let best = (0..counted.len()).max_by(|&i, &j| counted[i].total_cmp(&counted[j])).unwrap();
        let truth = code.relative_label(&e, sector)? as usize;
        ml_correct += (best == truth) as usize;
        println!(
            "seed {seed}: |e| = {:>2}, |s| = {:>2}, P(true class) = {:.4}",
            e.weight(),
            s.weight(),
            counted[truth]
        );
    }
    println!("largest disagreement between the two routes: {max_diff:.2e}");
    println!("maximum-likelihood decoding correct in {ml_correct}/{trials}");
    Ok(())
}
