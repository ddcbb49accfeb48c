//! A noisy-measurement history of the 3D toric code: faults, detection
//! events, a recovery, and the 4D spin model the history maps to.
//!
//! cargo run --example toric_code_spacetime

use toric_threshold::models::nishimori_beta;
use toric_threshold::toric::{nishimori_anisotropy, NoiseParams, Sector, ToricCode3D};

fn main() -> toric_threshold::Result<()> {
    let code = ToricCode3D::new(3)?;
    for sector in [Sector::Z, Sector::X] {
        let noise = NoiseParams::new(0.03, 4, sector)?.with_q(0.05)?;
        let st = code.spacetime(&noise)?;
        let e = st.sample_error(&noise, 17)?;
        let h = st.detection_events(&e)?;
        let (space, time) = st.split(&e.chain);
        println!("{sector:?} sector, {} rounds", st.rounds());
        println!("  qubit faults {}, measurement faults {}", space.weight(), time.weight());
        println!("  detection events {}, final syndrome {}", h.events.weight(), h.final_syndrome.weight());
        assert_eq!(st.complex().boundary(&e.chain)?, h.events);

        let r = st.recovery_from_events(&h)?;
        println!("  recovery weight {}, logical class {}", r.weight(), st.logical_class(&e, &h, &r)?);

        let k = nishimori_anisotropy(noise.p, noise.q)?;
        let model = st.model(k)?;
        let d = st.disorder(&model, &e)?;
        println!(
            "  maps to {}: {} spins, {} terms, {} antiferromagnetic; beta_N = {:.4}, K = {:.4}",
            model.kind(),
            model.n_spins(),
            model.n_terms(),
            d.n_flipped(),
            nishimori_beta(noise.p)?,
            k
        );
    }
    Ok(())
}
