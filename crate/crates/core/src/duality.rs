//! Kramers-Wannier and entropy dualities.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{canonical_hash, Incidence, ModelKind, SpinModel, TemporalTerms};

/// β̃J̃ with sinh(2βJ) sinh(2β̃J̃) = 1.
pub fn kw_dual_coupling(beta_j: f64) -> Result<f64> {
    if !beta_j.is_finite() || beta_j <= 0.0 {
        return Err(Error::Domain(format!(
            "dual coupling needs a positive finite coupling, got {beta_j}"
        )));
    }
    Ok(0.5 * (1.0 / (2.0 * beta_j).sinh()).asinh())
}

/// The coupling fixed by [`kw_dual_coupling`]: ½ ln(1 + √2).
pub fn self_dual_coupling() -> f64 {
    0.5 * (1.0 + 2f64.sqrt()).ln()
}

/// Binary entropy in bits, with 0 log 0 = 0.
pub fn shannon_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(h(p) + h(1.0 - p))
}

/// Inverse of the entropy on [0, ½], by bisection.
fn entropy_inverse(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    // the entropy is increasing on [0, ½]
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shannon_entropy(mid).expect("in range") < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// p̃ in (0, ½) with H(p) + H(p̃) = 1.
pub fn dual_critical_p(p_c: f64) -> Result<f64> {
    if p_c == 0.5 {
        return Err(Error::Branch(
            "H(0.5) = 1 leaves the partner at 0; choose the branch explicitly".into(),
        ));
    }
    if !(p_c > 0.0 && p_c < 0.5) {
        return Err(Error::Domain(format!("critical rate {p_c} outside (0, 0.5)")));
    }
    Ok(entropy_inverse(1.0 - shannon_entropy(p_c)?))
}

/// Error rate where H(p) = ½, the fixed point of [`dual_critical_p`].
pub fn self_dual_threshold() -> f64 {
    entropy_inverse(0.5)
}

/// Structural record of a dual-model construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub input_kind: ModelKind,
    pub dual_kind: ModelKind,
    /// (spin rank, term rank) before and after.
    pub input_ranks: (usize, usize),
    pub dual_ranks: (usize, usize),
    /// Canonical hash of the constraint hypergraph carried through the
    /// dual-cell bijection.
    pub witness_hash: String,
    /// Canonical hash of the dual kind built directly on the dual complex.
    pub dual_hash: String,
    pub isomorphic: bool,
    /// Input term i becomes dual term `term_map[i]`.
    pub term_map: Vec<u32>,
}

/// The Kramers-Wannier dual of a boundary-form model on a fully periodic
/// complex: spins on the dual cells of the model's constraint rank, terms
/// on the dual cells of its term rank.
pub fn derive_dual_model(model: &SpinModel) -> Result<(SpinModel, DualityReport)> {
    let cx = model.complex();
    if !cx.is_fully_periodic() {
        return Err(Error::Unsupported(
            "dual models are built on fully periodic complexes".into(),
        ));
    }
    if model.incidence() != Incidence::Boundary {
        return Err(Error::Unsupported("dual construction expects the boundary form".into()));
    }
    let d = cx.dim();
    let k_t = model.term_rank();
    if k_t + 1 > d {
        return Err(Error::Rank("model has no constraint cells".into()));
    }
    let partner = model.constraint_partner()?;
    // carry the partner through the dual-cell bijection
    let spin_map: Vec<u32> = (0..partner.n_spins())
        .map(|s| cx.dual_index(partner.spin_rank(), s).map(|x| x as u32))
        .collect::<Result<_>>()?;
    let term_map: Vec<u32> = (0..partner.n_terms())
        .map(|t| cx.dual_index(partner.term_rank(), t).map(|x| x as u32))
        .collect::<Result<_>>()?;
    let witness_hash = canonical_hash(
        partner.n_spins(),
        (0..partner.n_terms()).map(|t| {
            partner
                .term_members(t)
                .iter()
                .map(|&s| spin_map[s as usize])
                .collect()
        }),
    );
    let dual_cx = Arc::new(cx.dual_complex());
    let rule = match model.descriptor().temporal_terms {
        TemporalTerms::None => TemporalTerms::None,
        TemporalTerms::ContainingTime => TemporalTerms::TransverseToTime,
        TemporalTerms::TransverseToTime => TemporalTerms::ContainingTime,
    };
    let dual = SpinModel::build(model.kind().dual(), dual_cx)?.with_anisotropy(rule, 1.0)?;
    let dual_hash = dual.incidence_hash();
    let report = DualityReport {
        input_kind: model.kind(),
        dual_kind: dual.kind(),
        input_ranks: (model.spin_rank(), k_t),
        dual_ranks: (dual.spin_rank(), dual.term_rank()),
        isomorphic: witness_hash == dual_hash,
        witness_hash,
        dual_hash,
        term_map,
    };
    if !report.isomorphic {
        return Err(Error::Precondition(
            "constraint hypergraph does not match the dual model".into(),
        ));
    }
    Ok((dual, report))
}

/// Entropy-relation summary for a critical rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyDuality {
    pub p_c: f64,
    pub dual_p_c: f64,
    pub entropy: f64,
    pub dual_entropy: f64,
}

pub fn entropy_duality(p_c: f64) -> Result<EntropyDuality> {
    let dual_p_c = dual_critical_p(p_c)?;
    Ok(EntropyDuality {
        p_c,
        dual_p_c,
        entropy: shannon_entropy(p_c)?,
        dual_entropy: shannon_entropy(dual_p_c)?,
    })
}
