//! Kramers-Wannier duality, structurally on tori and exactly on small open
//! boxes, where ln Z of a model and of its dual differ by a known prefactor.
//!
//! cargo run --release --example kramers_wannier

use std::sync::Arc;

use toric_threshold::duality::{derive_dual_model, kw_dual_coupling, self_dual_coupling};
use toric_threshold::exact::{kw_prefactor_check, EnumerationBudget};
use toric_threshold::lattice::CellComplex;
use toric_threshold::models::{DisorderSample, ModelKind, SpinModel};

fn main() -> toric_threshold::Result<()> {
    for kind in ModelKind::ALL {
        let model = SpinModel::build(kind, Arc::new(CellComplex::torus(kind.dim(), 2)?))?;
        let (dual, report) = derive_dual_model(&model)?;
        println!(
            "{kind} -> {} ({} spins, {} terms), isomorphic: {}",
            report.dual_kind,
            dual.n_spins(),
            dual.n_terms(),
            report.isomorphic
        );
    }

    println!("self-dual coupling {:.6}", self_dual_coupling());
    let model = SpinModel::build(ModelKind::Rbim3, Arc::new(CellComplex::open_box(&[3, 3, 2])?))?;
    let partner = model.constraint_partner()?;
    let clean = DisorderSample::uniform(model.n_terms());
    for beta in [0.1, 0.3, 0.6] {
        let c = kw_prefactor_check(&model, &partner, &clean, beta, &EnumerationBudget::default())?;
        println!(
            "beta {beta:.2} <-> {:.4}: ln Z = {:.6}, prefactor + ln Z* = {:.6}, residual {:.1e}",
            kw_dual_coupling(beta)?,
            c.ln_z,
            c.ln_prefactor + c.ln_z_dual,
            c.residual
        );
    }
    Ok(())
}
