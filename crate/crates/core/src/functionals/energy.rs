use crate::context::ModelContext;
use crate::envelopes::{singularity_cmp, SingularityType};
use crate::error::{Error, Result};
use crate::grid::{check_domains, DiscreteMeasure, ScalarField};
use crate::monge_ampere::ma_measure;

use super::extended::Extended;
use super::weight::Weight;

/// Membership in the relative full-mass class of `φ`: same mask, at least as
/// singular, and equal mass within `1e-8` relative.
pub fn check_membership(ctx: &ModelContext, u: &ScalarField, phi: &ScalarField) -> Result<()> {
    check_domains(u.domain(), phi.domain())?;
    if u.mask() != phi.mask() {
        return Err(Error::NotInClass("singular masks differ".into()));
    }
    match singularity_cmp(ctx, u, phi)? {
        SingularityType::MoreSingular | SingularityType::Same => {}
        other => return Err(Error::NotInClass(format!("singularity type is {other:?}"))),
    }
    let mu = ma_measure(ctx, u)?.total();
    let mphi = ma_measure(ctx, phi)?.total();
    if (mu - mphi).abs() > 1e-8 * mphi.max(1.0) {
        return Err(Error::NotInClass(format!("mass {mu} differs from {mphi}")));
    }
    Ok(())
}

/// `∫ χ(|u − φ|) MA(u)`.
pub fn energy_chi(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    chi: &Weight,
) -> Result<Extended> {
    check_membership(ctx, u, phi)?;
    let mu = ma_measure(ctx, u)?;
    energy_chi_with(&mu, u, phi, chi)
}

/// [`energy_chi`] against a precomputed `MA(u)`, without membership checks.
pub fn energy_chi_with(
    mu: &DiscreteMeasure,
    u: &ScalarField,
    phi: &ScalarField,
    chi: &Weight,
) -> Result<Extended> {
    check_domains(u.domain(), phi.domain())?;
    check_domains(u.domain(), mu.domain())?;
    let mut acc = 0.0;
    for (i, &w) in mu.weights().iter().enumerate() {
        if w == 0.0 || phi.is_masked(i) {
            continue;
        }
        if u.is_masked(i) {
            return Ok(Extended::Infinite);
        }
        acc += chi.eval((u.value(i) - phi.value(i)).abs()) * w;
    }
    Ok(Extended::from_f64(acc))
}

/// `E_p(u, φ) = ∫ |u − φ|^p MA(u)`.
pub fn energy_p(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    p: f64,
) -> Result<Extended> {
    energy_chi(ctx, u, phi, &Weight::power(p)?)
}
