//! Rooftop and model envelopes, cutoffs and singularity comparison.

use serde::{Deserialize, Serialize};

use crate::context::ModelContext;
use crate::convex::p_envelope;
use crate::error::{Error, Result};
use crate::grid::{check_domains, pointwise_max, ScalarField};
use crate::monge_ampere::ma_trusted;

/// `P(min(ψ, φ))`.
pub fn rooftop(ctx: &ModelContext, psi: &ScalarField, phi: &ScalarField) -> Result<ScalarField> {
    p_envelope(ctx, &psi.pointwise_min(phi)?)
}

/// Cap on the number of doublings of the shift `C` in [`model_envelope`].
pub const MAX_DOUBLINGS: usize = 60;

/// `lim_{C→∞} P(ψ + C, φ)`. The limit is reached as soon as `ψ + C ≥ φ` on
/// every node where both are finite, which doubling finds in `O(log)` steps.
pub fn model_envelope(
    ctx: &ModelContext,
    psi: &ScalarField,
    phi: &ScalarField,
) -> Result<ScalarField> {
    check_domains(psi.domain(), phi.domain())?;
    let need = (0..psi.domain().len())
        .filter(|&i| !psi.is_masked(i) && !phi.is_masked(i))
        .map(|i| phi.value(i) - psi.value(i))
        .fold(f64::NEG_INFINITY, f64::max);
    if need == f64::NEG_INFINITY {
        return Err(Error::NoMinorant);
    }
    let mut c = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        if c >= need {
            return rooftop(ctx, &psi.shift(c), phi);
        }
        c *= 2.0;
    }
    Err(Error::NonStabilization(MAX_DOUBLINGS))
}

/// Outcome of [`is_model`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCheck {
    pub is_model: bool,
    /// `sup |φ − P[φ](V)|` over unmasked nodes (`inf` when masks differ).
    pub distance: f64,
    pub mass: f64,
    pub envelope_mass: f64,
}

/// Whether `φ = P[φ](V)` with `V` the reference potential.
pub fn is_model(ctx: &ModelContext, phi: &ScalarField) -> Result<ModelCheck> {
    let env = model_envelope(ctx, phi, ctx.reference_potential())?;
    let distance = if env.mask() != phi.mask() {
        f64::INFINITY
    } else {
        phi.unmasked()
            .map(|i| (phi.value(i) - env.value(i)).abs())
            .fold(0.0, f64::max)
    };
    let mass = ma_trusted(ctx, &crate::convex::convex_envelope(phi)?)?.total();
    let envelope_mass = ma_trusted(ctx, &env)?.total();
    Ok(ModelCheck {
        is_model: distance <= 1e-8,
        distance,
        mass,
        envelope_mass,
    })
}

/// `max(u, φ − j)`; `j = inf` returns `u`.
pub fn cutoff(u: &ScalarField, phi: &ScalarField, j: f64) -> Result<ScalarField> {
    if j.is_nan() || j < 0.0 {
        return Err(Error::NegativeParameter(j));
    }
    if j == f64::INFINITY {
        check_domains(u.domain(), phi.domain())?;
        return Ok(u.clone());
    }
    pointwise_max(u, &phi.shift(-j))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityType {
    LessSingular,
    MoreSingular,
    Same,
    Incomparable,
}

/// Threshold standing in for "bounded" at a fixed resolution.
pub fn boundedness_threshold(ctx: &ModelContext) -> f64 {
    1e3 * ctx.domain().diameter() * ctx.body().diameter()
}

/// Classifies `u` against `v`: `LessSingular` means `v ≤ u + C`.
pub fn singularity_cmp(
    ctx: &ModelContext,
    u: &ScalarField,
    v: &ScalarField,
) -> Result<SingularityType> {
    check_domains(u.domain(), v.domain())?;
    let t = boundedness_threshold(ctx);
    let n = u.domain().len();
    let mut up = f64::NEG_INFINITY;
    let mut down = f64::NEG_INFINITY;
    for i in 0..n {
        if !u.is_masked(i) && !v.is_masked(i) {
            up = up.max(v.value(i) - u.value(i));
            down = down.max(u.value(i) - v.value(i));
        }
    }
    let u_in_v = (0..n).all(|i| !u.is_masked(i) || v.is_masked(i));
    let v_in_u = (0..n).all(|i| !v.is_masked(i) || u.is_masked(i));
    let less = u_in_v && up <= t;
    let more = v_in_u && down <= t;
    Ok(match (less, more) {
        (true, true) => SingularityType::Same,
        (true, false) => SingularityType::LessSingular,
        (false, true) => SingularityType::MoreSingular,
        (false, false) => SingularityType::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monge_ampere::mass;

    fn ctx1() -> ModelContext {
        ModelContext::unit(1, 101).unwrap()
    }

    fn masked_at(u: &ScalarField, nodes: &[usize]) -> ScalarField {
        let mut m = vec![false; u.domain().len()];
        for &i in nodes {
            m[i] = true;
        }
        u.clone().with_mask(&m).unwrap()
    }

    #[test]
    fn rooftop_examples() {
        let ctx = ctx1();
        let r = ctx.reference_potential();
        assert_eq!(rooftop(&ctx, r, r).unwrap(), *r);
        let low = r.shift(-3.0);
        let out = rooftop(&ctx, &low, r).unwrap();
        for i in 0..101 {
            assert!((out.value(i) - low.value(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn model_envelope_of_bounded_psi_is_reference() {
        let ctx = ctx1();
        let d = *ctx.domain();
        let v = ctx.reference_potential();
        let psi = ScalarField::from_fn(d, |x| (2.0 * x[0]).sin() - 4.0);
        let env = model_envelope(&ctx, &psi, v).unwrap();
        assert!(v
            .values()
            .iter()
            .zip(env.values())
            .all(|(a, b)| (a - b).abs() < 1e-12));
        let env7 = model_envelope(&ctx, &psi.shift(7.0), v).unwrap();
        assert_eq!(env, env7);
    }

    #[test]
    fn model_predicate() {
        let ctx = ctx1();
        let v = ctx.reference_potential();
        assert!(is_model(&ctx, v).unwrap().is_model);
        assert!(!is_model(&ctx, &v.shift(-1.0)).unwrap().is_model);
        let psi = masked_at(
            &ScalarField::from_fn(*ctx.domain(), |x| x[0].abs()),
            &[30, 31],
        );
        let phi = model_envelope(&ctx, &psi, v).unwrap();
        let chk = is_model(&ctx, &phi).unwrap();
        assert!(chk.is_model);
        assert!((chk.mass - chk.envelope_mass).abs() < 1e-12);
        assert!((mass(&ctx, &phi).unwrap() - mass(&ctx, &psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cutoff_examples() {
        let ctx = ctx1();
        let phi = ctx.reference_potential();
        let u = phi.shift(-2.0);
        assert_eq!(cutoff(&u, phi, 0.0).unwrap(), *phi);
        assert_eq!(cutoff(&u, phi, f64::INFINITY).unwrap(), u);
        let um = masked_at(&u, &[10]);
        let c = cutoff(&um, phi, 5.0).unwrap();
        assert!(!c.is_masked(10));
        assert_eq!(c.value(10), phi.value(10) - 5.0);
    }

    #[test]
    fn singularity_examples() {
        let ctx = ctx1();
        let u = ctx.reference_potential().clone();
        assert_eq!(
            singularity_cmp(&ctx, &u, &u.shift(9.0)).unwrap(),
            SingularityType::Same
        );
        let um = masked_at(&u, &[5]);
        assert_eq!(
            singularity_cmp(&ctx, &um, &u).unwrap(),
            SingularityType::MoreSingular
        );
        assert_eq!(
            singularity_cmp(&ctx, &u, &um).unwrap(),
            SingularityType::LessSingular
        );
        let vm = masked_at(&u, &[6]);
        assert_eq!(
            singularity_cmp(&ctx, &um, &vm).unwrap(),
            SingularityType::Incomparable
        );
    }
}
