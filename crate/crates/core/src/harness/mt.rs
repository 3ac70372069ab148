//! Certificates for the weighted Moser-Trudinger inequality and the mass
//! profile bound.

use std::time::Instant;

use crate::context::ModelContext;
use crate::convex::{contact_set, default_contact_tol, p_envelope};
use crate::error::{Error, Result};
use crate::functionals::{check_membership, energy_chi_with, tau2_at_one, tau2_power, Weight};
use crate::grid::{gaps, sup_rel, ScalarField};
use crate::monge_ampere::ma_measure;

use super::report::{CertificateReport, Digest};
use super::skoda::SkodaSurrogate;

/// Tolerance on `sup(u − φ) = −1`.
const NORMALIZATION_TOL: f64 = 1e-9;

/// Inputs shared by both certificates: `χ₁(1) = 1`, `χ₂`, the gaps and the
/// energy `E_{χ₁}(u, φ)`.
struct Prepared {
    chi1: Weight,
    chi2: Weight,
    gap: Vec<Option<f64>>,
    energy: f64,
    mass: f64,
    n: usize,
}

fn prepare(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    chi1: &Weight,
) -> Result<Prepared> {
    let s = sup_rel(u, phi)?;
    if (s + 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization(s));
    }
    check_membership(ctx, u, phi)?;
    let n = ctx.dim();
    let chi1 = chi1.normalized_at_one()?;
    let chi2 = chi1.chi2(n)?;
    let mu = ma_measure(ctx, u)?;
    let mass = ma_measure(ctx, phi)?.total();
    let energy = energy_chi_with(&mu, u, phi, &chi1)?
        .finite()
        .ok_or_else(|| Error::NotInClass("infinite weighted energy".into()))?;
    Ok(Prepared {
        chi1,
        chi2,
        gap: gaps(u, phi)?,
        energy,
        mass,
        n,
    })
}

fn digest(name: &str, u: &ScalarField, phi: &ScalarField, chi1: &Weight, extra: &[f64]) -> u64 {
    let spec = serde_json::to_string(&crate::functionals::WeightSpec::from(chi1.clone()))
        .unwrap_or_default();
    Digest::default()
        .str(name)
        .field(u)
        .field(phi)
        .str(&spec)
        .floats(extra)
        .finish()
}

/// Rebuilds the proof objects `a`, `ψ = φ − aχ₂(φ − u)`, `P(ψ)` and
/// `v = φ − γ₂(φ − P(ψ))` and checks the five claims made about them. The
/// final integral is reported against the fitted Skoda constants only.
pub fn mt_certificate(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    chi1: &Weight,
    beta: f64,
    skoda: &SkodaSurrogate,
    label: &str,
) -> Result<CertificateReport> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::BetaTooSmall(beta));
    }
    let start = Instant::now();
    let pre = prepare(ctx, u, phi, chi1)?;
    let Prepared {
        chi1,
        chi2,
        gap,
        energy,
        mass,
        n,
    } = pre;
    let mut rep = CertificateReport::new(
        "mt",
        label,
        digest("mt", u, phi, &chi1, &[beta]),
        skoda.seed,
    );

    // (1) every gap is at least 1 and χ₁(1) = 1
    rep.le("energy_at_least_mass", mass, energy, 1e-12 * mass);

    let a = (mass / (beta * energy)).powf(1.0 / n as f64);
    let tau = tau2_at_one(&chi1, n, a)?;
    rep.constant("a", a);
    rep.constant("tau2_at_one", tau);
    rep.constant("energy", energy);
    rep.constant("mass", mass);
    rep.constant("beta", beta);
    if let Some(p) = chi1.power_exponent() {
        rep.close("tau2_closed_form", tau, tau2_power(p, n, a), 1e-8 * tau);
    }

    let psi_vals: Vec<f64> = gap
        .iter()
        .enumerate()
        .map(|(i, g)| match g {
            Some(g) => phi.value(i) - a * chi2.eval(*g),
            None => f64::NEG_INFINITY,
        })
        .collect();
    let psi = ScalarField::new(*u.domain(), psi_vals)?;
    let env = p_envelope(ctx, &psi)?;
    let ctol = default_contact_tol(&psi);
    let contact = contact_set(&psi, &env, ctol)?;

    // (2) v = φ − γ₂(φ − P(ψ)) ≤ u, with equality on the contact set
    let mut above = f64::NEG_INFINITY;
    let mut off_contact = 0.0f64;
    for i in u.unmasked() {
        let v = phi.value(i) - chi2.inverse((phi.value(i) - env.value(i)) / a);
        let d = v - u.value(i);
        above = above.max(d);
        if contact[i] {
            off_contact = off_contact.max(d.abs());
        }
    }
    let scale = 1.0 + u.sup_abs();
    rep.le("v_below_u", above, 0.0, 1e-9 * scale);
    rep.le(
        "v_equals_u_on_contact",
        off_contact,
        0.0,
        2.0 * ctol / a + 1e-9 * scale,
    );

    // (3) MA(P(ψ)) lives on the contact set
    let menv = ma_measure(ctx, &env)?;
    let outside: f64 = (0..contact.len())
        .filter(|&i| !contact[i])
        .map(|i| menv.weight(i))
        .sum();
    rep.le("envelope_mass_off_contact", outside, 0.0, 1e-8 * mass);
    rep.empirical(
        "contact_fraction",
        contact.iter().filter(|c| **c).count() as f64 / u.unmasked().count() as f64,
    );

    // (4) sup(P(ψ) − φ) ≥ −τ₂(1)
    rep.le(
        "sup_envelope_gap",
        -tau,
        sup_rel(&env, phi)?,
        1e-9 * (1.0 + tau),
    );

    // (5) aχ₂(gap) > 2 gap forces aχ₂(gap) ≥ 2τ₂(1)
    let split = gap
        .iter()
        .flatten()
        .map(|g| a * chi2.eval(*g))
        .zip(gap.iter().flatten())
        .filter(|(ag, g)| *ag > 2.0 * **g)
        .map(|(ag, _)| ag)
        .fold(f64::INFINITY, f64::min);
    rep.le("split_outside_k", 2.0 * tau, split, 1e-12 * (1.0 + tau));

    // (6) the integral with fitted constants, empirical only
    let rho = ctx.reference_density().weights();
    let c = 0.5 * skoda.c0 * beta.powf(-1.0 / n as f64) * mass.powf(1.0 / n as f64);
    let lhs: f64 = gap
        .iter()
        .enumerate()
        .filter_map(|(i, g)| {
            g.map(|g| rho[i] * (c * energy.powf(-1.0 / n as f64) * chi2.eval(g)).exp())
        })
        .sum();
    rep.constant("c0", skoda.c0);
    rep.constant("c", c);
    rep.empirical("mt_integral", lhs);
    rep.empirical("mt_constant", skoda.mt_constant());
    rep.empirical("mt_ratio", lhs / skoda.mt_constant());
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// `m (∫ m(t) χ₁(t)^{1/n} dt)^n / S ≤ E_{χ₁}(u, φ)` with the fitted `S`.
/// The profile integral is exact: by Fubini it equals `Σ ρ_i χ₂(gap_i)`.
pub fn mass_profile_bound(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    chi1: &Weight,
    skoda: &SkodaSurrogate,
    label: &str,
) -> Result<CertificateReport> {
    let start = Instant::now();
    let Prepared {
        chi1,
        chi2,
        gap,
        energy,
        mass,
        n,
    } = prepare(ctx, u, phi, chi1)?;
    let mut rep = CertificateReport::new(
        "mass_profile",
        label,
        digest("mass_profile", u, phi, &chi1, &[]),
        skoda.seed,
    );
    let rho = ctx.reference_density().weights();
    let profile: f64 = gap
        .iter()
        .enumerate()
        .filter_map(|(i, g)| g.map(|g| rho[i] * chi2.eval(g)))
        .sum();
    let s = skoda.profile_constant(n);
    rep.constant("S", s);
    rep.constant("energy", energy);
    rep.constant("mass", mass);
    rep.empirical("profile_integral", profile);
    rep.le(
        "profile_bound",
        mass * profile.powi(n as i32) / s,
        energy,
        1e-12 * energy,
    );
    rep.le("S_exceeds_one", 1.0, s, 0.0);
    rep.holds("S_strictly_above_one", s > 1.0);
    rep.wall_time = start.elapsed();
    Ok(rep)
}
