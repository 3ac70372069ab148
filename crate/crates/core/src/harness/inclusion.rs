//! Certificates that bounded entropy controls the relative energy.

use std::time::Instant;

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::functionals::{
    check_membership, conj_pair, energy_chi_with, entropy, entropy_weight, Weight,
};
use crate::grid::{gaps, sup_rel, ScalarField};
use crate::monge_ampere::ma_measure;

use super::report::{CertificateReport, Digest};
use super::skoda::SkodaSurrogate;

/// Both Young-inequality displays with `s = f` (density of `MA(u)` with
/// respect to the unit-volume reference) and `t = c gap^p`, then with
/// `t = c gap^p / E_p^{1/n}`, and the bound on `E_p` this yields. Uses
/// `c = c₀ / 2` from the fitted Skoda constants and `p = n/(n−1)`.
pub fn inclusion_check(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    skoda: &SkodaSurrogate,
    label: &str,
) -> Result<CertificateReport> {
    let n = ctx.dim();
    if n < 2 {
        return Err(Error::Invalid(
            "the energy inclusion needs dimension 2; use stability_scan in 1-D".into(),
        ));
    }
    let start = Instant::now();
    let s = sup_rel(u, phi)?;
    if (s + 1.0).abs() > 1e-9 {
        return Err(Error::Normalization(s));
    }
    check_membership(ctx, u, phi)?;
    let ent = entropy(ctx, u)?;
    if !ent.is_finite() {
        return Err(Error::InfiniteEntropy);
    }
    let p = n as f64 / (n as f64 - 1.0);
    let mu = ma_measure(ctx, u)?;
    let e_p = energy_chi_with(&mu, u, phi, &Weight::power(p)?)?;
    let digest = Digest::default()
        .str("inclusion")
        .field(u)
        .field(phi)
        .finish();
    let mut rep = CertificateReport::new("inclusion", label, digest, skoda.seed);
    rep.holds("energy_finite", e_p.is_finite());
    let e_p = e_p.to_f64();
    let rho = ctx.reference_density().weights();
    let gap = gaps(u, phi)?;
    let c = 0.5 * skoda.c0;
    rep.constant("p", p);
    rep.constant("c", c);
    rep.empirical("entropy", ent.to_f64());
    rep.empirical("energy_p", e_p);

    // Σ χ(f) ρ, with f = w / ρ so that Σ f ρ = MA(u)
    let mut chi_f = 0.0;
    for (i, w) in mu.weights().iter().enumerate() {
        if rho[i] > 0.0 {
            chi_f += entropy_weight(w / rho[i])? * rho[i];
        }
    }
    let display = |scale: f64| -> Result<(f64, f64)> {
        let mut lhs = 0.0;
        let mut dual = 0.0;
        for (i, g) in gap.iter().enumerate() {
            let Some(g) = g else { continue };
            let t = scale * g.powf(p);
            lhs += t * mu.weight(i);
            dual += conj_pair(t)? * rho[i];
        }
        Ok((lhs, chi_f + dual))
    };
    let (l1, r1) = display(c)?;
    rep.le("young_plain", l1, r1, 1e-12 * r1.abs().max(1.0));
    let norm = e_p.powf(-1.0 / n as f64);
    let (l2, r2) = display(c * norm)?;
    rep.le("young_normalized", l2, r2, 1e-12 * r2.abs().max(1.0));
    let bound = (r2 / c).powf(n as f64 / (n as f64 - 1.0));
    rep.le("energy_bound", e_p, bound, 1e-10 * bound.max(1.0));
    rep.empirical("chi_of_density", chi_f);
    rep.empirical("rhs_normalized", r2);
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// Sup of `E_p` over the members with entropy at most `B`, for each budget.
/// Larger budgets must never give a smaller sup.
pub fn budget_monotonicity(
    entropies: &[f64],
    energies: &[f64],
    budgets: &[f64],
    label: &str,
) -> CertificateReport {
    let digest = Digest::default()
        .floats(entropies)
        .floats(energies)
        .floats(budgets)
        .finish();
    let mut rep = CertificateReport::new("inclusion_budget", label, digest, 0);
    let mut prev = f64::NEG_INFINITY;
    for &b in budgets {
        let sup = entropies
            .iter()
            .zip(energies)
            .filter(|(e, _)| **e <= b)
            .map(|(_, en)| *en)
            .fold(f64::NEG_INFINITY, f64::max);
        rep.empirical(&format!("sup_energy_at_B={b}"), sup);
        if prev > f64::NEG_INFINITY {
            rep.le(&format!("monotone_at_B={b}"), prev, sup, 0.0);
        }
        prev = prev.max(sup);
    }
    rep
}

/// 1-D branch: finite entropy forces the same singularity type, so
/// `sup |u − φ|` stays bounded and stable under refinement. `build` makes
/// the normalized potential and the model potential at a given resolution.
pub fn stability_scan(
    ctx: &ModelContext,
    resolutions: &[usize],
    max_variation: f64,
    build: impl Fn(&ModelContext) -> Result<(ScalarField, ScalarField)>,
    label: &str,
) -> Result<CertificateReport> {
    let start = Instant::now();
    let mut sups = Vec::new();
    let mut digest = Digest::default().str("stability");
    for &res in resolutions {
        let c = ctx.with_resolution(res)?;
        let (u, phi) = build(&c)?;
        digest = digest.field(&u);
        let ent = entropy(&c, &u)?;
        let sup = gaps(&u, &phi)?.into_iter().flatten().fold(0.0, f64::max);
        sups.push((res, ent, sup));
    }
    let mut rep = CertificateReport::new("inclusion_1d", label, digest.finish(), 0);
    for (res, ent, sup) in &sups {
        rep.holds(&format!("entropy_finite_at_{res}"), ent.is_finite());
        rep.holds(&format!("sup_gap_finite_at_{res}"), sup.is_finite());
        rep.empirical(&format!("sup_gap_at_{res}"), *sup);
    }
    let lo = sups.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let hi = sups.iter().map(|s| s.2).fold(0.0, f64::max);
    rep.le("relative_variation", (hi - lo) / hi, max_variation, 0.0);
    rep.wall_time = start.elapsed();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::families::{separable, Bump};
    use crate::harness::skoda::skoda_surrogate;

    #[test]
    fn constant_gap_has_energy_equal_mass() {
        let ctx = ModelContext::unit(2, 9).unwrap();
        let sk = skoda_surrogate(&ctx, 20, 1).unwrap();
        let phi = ctx.reference_potential();
        let rep = inclusion_check(&ctx, &phi.shift(-1.0), phi, &sk, "const").unwrap();
        assert!(rep.pass, "{rep:#?}");
        assert!((rep.value("energy_p").unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_scan_is_stable() {
        let ctx = ModelContext::unit(1, 101).unwrap();
        let b = Bump::new(0.5, 0.3).unwrap();
        let rep = stability_scan(
            &ctx,
            &[101, 201, 401],
            0.05,
            |c| Ok((separable(c, &[b])?, c.reference_potential().clone())),
            "bump",
        )
        .unwrap();
        assert!(rep.pass, "{rep:#?}");
    }

    #[test]
    fn budgets_are_monotone() {
        let rep = budget_monotonicity(&[0.5, 2.0, 4.0], &[3.0, 5.0, 4.0], &[1.0, 3.0, 5.0], "");
        assert!(rep.pass);
        assert_eq!(rep.value("sup_energy_at_B=5"), Some(5.0));
    }
}
