//! Oracle checks for the operators themselves, reported like certificates.

use std::time::Instant;

use crate::context::ModelContext;
use crate::convex::p_envelope;
use crate::envelopes::cutoff;
use crate::error::{Error, Result};
use crate::functionals::{energy_chi, Weight};
use crate::grid::{gaps, ScalarField};
use crate::monge_ampere::{ma_measure, star_interior};

use super::report::{CertificateReport, Digest};

/// Brute-force envelope in 1-D: the sup over affine minorants whose slope is
/// a secant slope of two nodes or an end of the body.
pub fn brute_force_envelope_1d(ctx: &ModelContext, f: &ScalarField) -> Result<Vec<f64>> {
    if ctx.dim() != 1 {
        return Err(Error::UnsupportedDimension(ctx.dim()));
    }
    let d = f.domain();
    let (lo, hi) = ctx.body().bounds(0);
    let idx: Vec<usize> = f.unmasked().collect();
    let xs: Vec<f64> = idx.iter().map(|&i| d.coords(i)[0]).collect();
    let fs: Vec<f64> = idx.iter().map(|&i| f.value(i)).collect();
    let mut slopes = vec![lo, hi];
    for a in 0..xs.len() {
        for b in a + 1..xs.len() {
            let s = (fs[b] - fs[a]) / (xs[b] - xs[a]);
            if s > lo && s < hi {
                slopes.push(s);
            }
        }
    }
    let mut out = vec![f64::NEG_INFINITY; d.len()];
    for s in slopes {
        let c = xs
            .iter()
            .zip(&fs)
            .map(|(x, v)| v - s * x)
            .fold(f64::INFINITY, f64::min);
        for (k, &i) in idx.iter().enumerate() {
            out[i] = out[i].max(s * xs[k] + c);
        }
    }
    Ok(out)
}

/// `p_envelope` against [`brute_force_envelope_1d`] in sup norm.
pub fn envelope_oracle(
    ctx: &ModelContext,
    f: &ScalarField,
    tol: f64,
    label: &str,
) -> Result<CertificateReport> {
    let start = Instant::now();
    let env = p_envelope(ctx, f)?;
    let brute = brute_force_envelope_1d(ctx, f)?;
    let mut rep = CertificateReport::new(
        "envelope_oracle",
        label,
        Digest::default().field(f).finish(),
        0,
    );
    let err = f
        .unmasked()
        .map(|i| (env.value(i) - brute[i]).abs())
        .fold(0.0, f64::max);
    rep.le("sup_error", err, 0.0, tol);
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// Alexandrov weights of a 1-D convex field from its slope jumps, clipped
/// to the body. Requires nondecreasing discrete slopes.
pub fn slope_jump_weights(ctx: &ModelContext, u: &ScalarField) -> Result<Option<Vec<f64>>> {
    let d = u.domain();
    let (lo, hi) = ctx.body().bounds(0);
    let idx: Vec<usize> = u.unmasked().collect();
    let xs: Vec<f64> = idx.iter().map(|&i| d.coords(i)[0]).collect();
    let fs: Vec<f64> = idx.iter().map(|&i| u.value(i)).collect();
    let s: Vec<f64> = (1..xs.len())
        .map(|k| (fs[k] - fs[k - 1]) / (xs[k] - xs[k - 1]))
        .collect();
    if s.windows(2).any(|w| w[1] < w[0]) {
        return Ok(None);
    }
    let mut w = vec![0.0; d.len()];
    for (k, &i) in idx.iter().enumerate() {
        let left = if k == 0 { lo } else { s[k - 1].max(lo) };
        let right = if k + 1 == idx.len() { hi } else { s[k].min(hi) };
        w[i] = (right - left).max(0.0);
    }
    Ok(Some(w))
}

/// Exact agreement of the 1-D Alexandrov measure with slope jumps.
pub fn ma_exactness_1d(
    ctx: &ModelContext,
    u: &ScalarField,
    label: &str,
) -> Result<CertificateReport> {
    let mut rep = CertificateReport::new(
        "ma_exactness",
        label,
        Digest::default().field(u).finish(),
        0,
    );
    let mu = ma_measure(ctx, u)?;
    match slope_jump_weights(ctx, u)? {
        Some(w) => {
            let err = w
                .iter()
                .zip(mu.weights())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            rep.le("nodewise_error", err, 0.0, 0.0);
        }
        None => {
            rep.holds("slopes_nondecreasing", false);
        }
    }
    Ok(rep)
}

/// `½ (u + r)`: strictly convex wherever `u` is convex, so the discrete
/// slopes are nondecreasing without relying on rounding in flat pieces.
pub fn strictly_convex(ctx: &ModelContext, u: &ScalarField) -> Result<ScalarField> {
    let r = ctx.reference_potential();
    let vals = (0..u.domain().len())
        .map(|i| 0.5 * (u.value(i) + r.value(i)))
        .collect();
    ScalarField::new(*u.domain(), vals)
}

/// Total mass of `MA(½|x|²)` against the body volume.
pub fn ma_total_mass(ctx: &ModelContext, tol: f64) -> Result<CertificateReport> {
    let u = ScalarField::from_fn(*ctx.domain(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1]));
    let mut rep = CertificateReport::new(
        "ma_exactness",
        "half_square_norm",
        Digest::default().field(&u).finish(),
        0,
    );
    let m = ma_measure(ctx, &u)?.total();
    rep.close("total_mass", m, ctx.volume(), tol);
    rep.empirical("total_mass", m);
    rep.constant("volume", ctx.volume());
    Ok(rep)
}

/// `MA(max(u, φ − j)) = MA(u)` on the nodes of `{u > φ − j}` whose
/// Alexandrov star lies in that set.
pub fn locality_check(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    j: f64,
    label: &str,
) -> Result<CertificateReport> {
    let uj = cutoff(u, phi, j)?;
    let set: Vec<bool> = (0..u.domain().len())
        .map(|i| !u.is_masked(i) && (phi.is_masked(i) || u.value(i) > phi.value(i) - j))
        .collect();
    let inner = star_interior(ctx, u, &set)?;
    let a = ma_measure(ctx, u)?;
    let b = ma_measure(ctx, &uj)?;
    let diff: f64 = (0..set.len())
        .filter(|&i| inner[i])
        .map(|i| (a.weight(i) - b.weight(i)).abs())
        .sum();
    let digest = Digest::default().field(u).field(phi).f64(j).finish();
    let mut rep = CertificateReport::new("plurifine_locality", label, digest, 0);
    rep.le("mass_difference", diff, 0.0, 1e-10 * a.total());
    let on_set = set.iter().filter(|s| **s).count().max(1) as f64;
    rep.empirical("set_fraction", on_set / u.unmasked().count().max(1) as f64);
    rep.empirical(
        "star_interior_fraction",
        inner.iter().filter(|s| **s).count() as f64 / on_set,
    );
    rep.constant("j", j);
    Ok(rep)
}

/// `E_χ(max(u, φ − j), φ)` along increasing `j`: nondecreasing and equal to
/// `E_χ(u, φ)` once `j` exceeds every gap.
pub fn energy_monotone(
    ctx: &ModelContext,
    u: &ScalarField,
    phi: &ScalarField,
    chi: &Weight,
    steps: usize,
    label: &str,
) -> Result<CertificateReport> {
    let start = Instant::now();
    let max_gap = gaps(u, phi)?.into_iter().flatten().fold(0.0, f64::max);
    let full = energy_chi(ctx, u, phi, chi)?.to_f64();
    let digest = Digest::default().field(u).field(phi).finish();
    let mut rep = CertificateReport::new("energy_increases", label, digest, 0);
    let tol = 1e-10 * full.max(1.0);
    let mut prev = f64::NEG_INFINITY;
    let mut last = 0.0;
    for k in 0..=steps {
        let j = (max_gap + 0.5) * k as f64 / steps as f64;
        let e = energy_chi(ctx, &cutoff(u, phi, j)?, phi, chi)?.to_f64();
        if k > 0 {
            rep.le(&format!("step_{k}"), prev, e, tol);
        }
        prev = e;
        last = e;
    }
    rep.close("limit", last, full, 1e-8 * full.max(1.0));
    rep.constant("max_gap", max_gap);
    rep.empirical("energy", full);
    rep.wall_time = start.elapsed();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::corpus::{fuzz_corpus, CorpusSpec};

    #[test]
    fn brute_force_matches_on_small_cases() {
        let ctx = ModelContext::unit(1, 41).unwrap();
        let f = ScalarField::from_fn(*ctx.domain(), |x| (3.0 * x[0]).sin() - x[0] * x[0]);
        assert!(envelope_oracle(&ctx, &f, 1e-9, "sin").unwrap().pass);
    }

    #[test]
    fn operator_checks_on_corpus() {
        let ctx = ModelContext::unit(1, 81).unwrap();
        let spec = CorpusSpec {
            count: 6,
            smoothing: vec![0.05, 0.2],
            ..Default::default()
        };
        let chi = Weight::power(2.0).unwrap();
        for it in fuzz_corpus(&ctx, &spec, 8).unwrap() {
            let strict = strictly_convex(&ctx, &it.u).unwrap();
            let rep = ma_exactness_1d(&ctx, &strict, &it.label).unwrap();
            assert!(rep.pass, "{rep:#?}");
            let rep = locality_check(&ctx, &it.u, &it.phi, 1.5, &it.label).unwrap();
            assert!(rep.pass, "{rep:#?}");
            let rep = energy_monotone(&ctx, &it.u, &it.phi, &chi, 8, &it.label).unwrap();
            assert!(rep.pass, "{rep:#?}");
        }
        let ctx2 = ModelContext::unit(2, 17).unwrap();
        assert!(ma_total_mass(&ctx2, 1e-10).unwrap().pass);
    }
}
