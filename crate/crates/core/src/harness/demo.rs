//! Single-shot certificates: a bounded potential with an atom, and the
//! weight constructor on a long synthetic tail.

use std::time::Instant;

use crate::context::ModelContext;
use crate::envelopes::{singularity_cmp, SingularityType};
use crate::error::{Error, Result};
use crate::functionals::{construct_weight, entropy, ConstructedWeight, Weight};
use crate::grid::{gaps, sup_rel, DiscreteMeasure, ScalarField};
use crate::monge_ampere::ma_density;

use super::report::{CertificateReport, Digest};

/// Width of the mollified kink in the finite-entropy variant.
pub const MOLLIFIER: f64 = 0.05;

/// `½ r + ½ λ e |x|` and its mollification `½ r + ½ λ √(x² + δ²) √(e² + δ²)`
/// on a symmetric 1-D domain `[−e, e]`. Both have the slopes of `r` at the
/// ends; the first has a slope jump of `λ e` at the origin.
pub fn demo_potentials(ctx: &ModelContext, delta: f64) -> Result<(ScalarField, ScalarField)> {
    let d = *ctx.domain();
    let (xa, xb) = d.bounds(0);
    if ctx.dim() != 1 || (xa + xb).abs() > 1e-12 * xb.abs() {
        return Err(Error::Invalid(
            "the atomic demo needs a symmetric 1-D domain".into(),
        ));
    }
    let l = ctx.lambda()[0];
    let e = xb;
    let kink = ScalarField::from_fn(d, |x| 0.25 * l * x[0] * x[0] + 0.5 * l * e * x[0].abs());
    let smooth = ScalarField::from_fn(d, |x| {
        0.25 * l * x[0] * x[0]
            + 0.5 * l * (x[0] * x[0] + delta * delta).sqrt() * (e * e + delta * delta).sqrt()
    });
    Ok((kink, smooth))
}

/// A bounded potential of the same singularity type as the reference whose
/// Monge-Ampere measure has an atom: its entropy is infinite. The mollified
/// variant and the reference itself have finite entropy.
pub fn atomic_entropy_demo(ctx: &ModelContext) -> Result<CertificateReport> {
    let start = Instant::now();
    let (kink, smooth) = demo_potentials(ctx, MOLLIFIER)?;
    let r = ctx.reference_potential();
    let digest = Digest::default()
        .str("no_ent")
        .field(&kink)
        .field(&smooth)
        .finish();
    let mut rep = CertificateReport::new("no_ent", "demo", digest, 0);
    let ent = entropy(ctx, &kink)?;
    let cmp = singularity_cmp(ctx, &kink, r)?;
    let dens = ma_density(ctx, &kink)?;
    rep.holds("entropy_infinite", !ent.is_finite());
    rep.holds("same_singularity_type", cmp == SingularityType::Same);
    rep.empirical("atom_mass", dens.singular_mass());
    rep.empirical("entropy", ent.to_f64());
    let smooth_ent = entropy(ctx, &smooth)?;
    rep.holds("mollified_entropy_finite", smooth_ent.is_finite());
    rep.empirical("mollified_entropy", smooth_ent.to_f64());
    rep.holds(
        "mollified_same_type",
        singularity_cmp(ctx, &smooth, r)? == SingularityType::Same,
    );
    let ref_ent = entropy(ctx, r)?;
    rep.holds("reference_entropy_finite", ref_ent.is_finite());
    rep.empirical("reference_entropy", ref_ent.to_f64());
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// Replaces the gaps of `u` by an exponential quantile transform under the
/// normalized `μ`: the node after cumulative mass `c` gets gap
/// `1 + log(1/(1 − c))`. The result has `sup(u − φ) = −1` and a tail whose
/// length grows with the number of charged nodes.
pub fn synthetic_tail(
    u: &ScalarField,
    phi: &ScalarField,
    mu: &DiscreteMeasure,
) -> Result<ScalarField> {
    let mu = mu.normalized()?;
    let g = gaps(u, phi)?;
    let mut order: Vec<usize> = (0..g.len())
        .filter(|&i| g[i].is_some() && mu.weight(i) > 0.0)
        .collect();
    order.sort_by(|&a, &b| g[a].unwrap().total_cmp(&g[b].unwrap()).then(a.cmp(&b)));
    let mut new_gap = vec![1.0; g.len()];
    let mut cum = 0.0f64;
    for &i in &order {
        new_gap[i] = 1.0 + (1.0 / (1.0f64 - cum).max(f64::MIN_POSITIVE)).ln();
        cum += mu.weight(i);
    }
    let vals = (0..g.len())
        .map(|i| match g[i] {
            Some(_) => phi.value(i) - new_gap[i],
            None => f64::NEG_INFINITY,
        })
        .collect();
    ScalarField::new(*u.domain(), vals)
}

/// Checks the constructed weight: `χ(0) = 0`, strictly increasing,
/// `ψ(t_k) ≥ k` at every breakpoint and
/// `∫ χ(φ − u) dμ ≤ χ(1) + Σ_{k ≤ K} k^{-2}`.
pub fn weight_construct_certificate(
    u: &ScalarField,
    phi: &ScalarField,
    mu: &DiscreteMeasure,
    label: &str,
) -> Result<(CertificateReport, ConstructedWeight)> {
    let start = Instant::now();
    let c = construct_weight(u, phi, mu)?;
    let digest = Digest::default()
        .str("weight_construct")
        .field(u)
        .field(phi)
        .floats(mu.weights())
        .finish();
    let mut rep = CertificateReport::new("weight_construct", label, digest, 0);
    rep.le("integral_bound", c.integral, c.bound, 1e-6);
    rep.empirical("bound_minus_integral", c.bound - c.integral);
    rep.constant("K", c.k_count() as f64);
    rep.constant("t_star", c.t_star);
    let Weight::Table { ts, vals } = &c.weight else {
        return Err(Error::Invalid("constructed weight is not tabulated".into()));
    };
    rep.holds("starts_at_zero", ts[0] == 0.0 && vals[0] == 0.0);
    rep.holds(
        "strictly_increasing",
        ts.windows(2).all(|w| w[1] > w[0]) && vals.windows(2).all(|w| w[1] > w[0]),
    );
    let mu_n = mu.normalized()?;
    let g = gaps(u, phi)?;
    // gaps after the constructor's normalization sup(u − φ) = −1
    let lift = 1.0 + sup_rel(u, phi)?;
    // same rounding tolerance as the constructor's level merge
    let tail = |t: f64| -> f64 {
        let t = t + 1e-12 * t.abs().max(1.0);
        (0..g.len())
            .filter(|&i| g[i].is_some_and(|gi| gi + lift > t))
            .map(|i| mu_n.weight(i))
            .sum()
    };
    let mut worst = f64::NEG_INFINITY;
    if c.k_count() > 0 {
        for (k, t) in c.breakpoints.iter().enumerate().skip(1) {
            worst = worst.max((k + 1) as f64 * tail(*t));
        }
    }
    rep.le("psi_at_breakpoints", worst, 1.0, 1e-12);
    rep.wall_time = start.elapsed();
    Ok((rep, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::corpus::{fuzz_corpus, CorpusSpec};
    use crate::monge_ampere::ma_measure;

    #[test]
    fn no_ent_demo_passes() {
        let ctx = ModelContext::unit(1, 201).unwrap();
        let rep = atomic_entropy_demo(&ctx).unwrap();
        assert!(rep.pass, "{rep:#?}");
        assert!((rep.value("atom_mass").unwrap() - 1.0).abs() < 0.01);
    }

    #[test]
    fn constructor_on_synthetic_tails() {
        let ctx = ModelContext::unit(1, 201).unwrap();
        for it in fuzz_corpus(&ctx, &CorpusSpec::default(), 3).unwrap() {
            let mu = ma_measure(&ctx, &it.u).unwrap();
            let tail = synthetic_tail(&it.u, &it.phi, &mu).unwrap();
            let (rep, _) = weight_construct_certificate(&tail, &it.phi, &mu, &it.label).unwrap();
            assert!(rep.pass, "{rep:#?}");
        }
    }
}
