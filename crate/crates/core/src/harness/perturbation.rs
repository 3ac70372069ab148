//! Certificate for the perturbation of the reference class by `t r`.

use std::time::Instant;

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::functionals::entropy;
use crate::grid::ScalarField;
use crate::monge_ampere::{ma_measure, mixed_family, perturbed_with, Perturbed};

use super::report::{CertificateReport, Digest};

/// `max(s log s, 0)`.
pub fn l_bar(s: f64) -> f64 {
    if s > 1.0 {
        s * s.ln()
    } else {
        0.0
    }
}

/// `Σ ρ_i L̄(S_i)`.
fn l_bar_integral(ctx: &ModelContext, s: &[f64]) -> f64 {
    let rho = ctx.reference_density().weights();
    s.iter().zip(rho).map(|(s, r)| l_bar(*s) * r).sum()
}

/// Whether node-wise agreement of the direct and expanded measures is
/// asserted or only reported (generic 2-D grids are not Minkowski additive
/// cell by cell).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nodewise {
    Assert,
    Report,
}

/// For each `t`: `MA(u + t r)` against `Σ binom(n, j) t^{n−j} μ_j`, the
/// integral of `L̄(S(t))` and its scaling bound relative to `ε`.
pub fn perturbation_scan(
    ctx: &ModelContext,
    u: &ScalarField,
    ts: &[f64],
    eps: f64,
    nodewise: Nodewise,
    label: &str,
) -> Result<CertificateReport> {
    for &t in ts.iter().chain(std::iter::once(&eps)) {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::NegativeParameter(t));
        }
    }
    if eps <= 0.0 {
        return Err(Error::NegativeParameter(eps));
    }
    let start = Instant::now();
    if !entropy(ctx, u)?.is_finite() {
        return Err(Error::InfiniteEntropy);
    }
    let mu = ma_measure(ctx, u)?;
    let family = mixed_family(ctx, u)?;
    let n = ctx.dim() as i32;
    let digest = Digest::default()
        .str("perturbation")
        .field(u)
        .floats(ts)
        .f64(eps)
        .finish();
    let mut rep = CertificateReport::new("perturbation", label, digest, 0);
    rep.constant("eps", eps);
    let refw = ctx.reference_ma();
    let at_eps = perturbed_with(ctx, u, eps, &family)?;
    let j_eps = l_bar_integral(ctx, &at_eps.s_direct);
    let s_eps_mass: f64 = {
        let rho = ctx.reference_density().weights();
        at_eps.s_direct.iter().zip(rho).map(|(s, r)| s * r).sum()
    };
    for &t in ts {
        let p: Perturbed = perturbed_with(ctx, u, t, &family)?;
        let total: f64 = p.direct.iter().sum();
        rep.le(
            &format!("total_t={t}"),
            p.total_gap(),
            0.0,
            1e-9 * total.max(1.0),
        );
        let node = p.nodewise_gap(refw);
        match nodewise {
            Nodewise::Assert => {
                rep.le(&format!("nodewise_t={t}"), node, 0.0, 1e-7);
            }
            Nodewise::Report => rep.empirical(&format!("nodewise_t={t}"), node),
        }
        if t == 0.0 {
            let f: Vec<f64> = (0..refw.len()).map(|i| mu.weight(i) / refw[i]).collect();
            let d = f
                .iter()
                .zip(&p.s_expansion)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            rep.le("s0_is_density", d, 0.0, 0.0);
        }
        let j = l_bar_integral(ctx, &p.s_direct);
        rep.holds(&format!("finite_t={t}"), j.is_finite());
        rep.empirical(&format!("lbar_t={t}"), j);
        if t <= eps {
            rep.le(
                &format!("below_eps_t={t}"),
                j,
                j_eps,
                1e-12 * j_eps.max(1.0),
            );
        } else {
            let tau_n = (t / eps).powi(n);
            let bound = tau_n * tau_n.ln() * s_eps_mass + tau_n * j_eps;
            rep.le(&format!("scaling_t={t}"), j, bound, 1e-12 * bound.max(1.0));
        }
    }
    rep.wall_time = start.elapsed();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scales_like_one_plus_t_squared() {
        let ctx = ModelContext::unit(2, 9).unwrap();
        let r = ctx.reference_potential();
        let rep = perturbation_scan(&ctx, r, &[0.0, 0.25, 1.0, 4.0], 0.25, Nodewise::Assert, "r")
            .unwrap();
        assert!(rep.pass, "{rep:#?}");
        for t in [0.25f64, 1.0, 4.0] {
            let s = (1.0 + t).powi(2);
            let want = s * s.ln();
            let got = rep.value(&format!("lbar_t={t}")).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "t={t} {got} {want}");
        }
        assert_eq!(rep.value("lbar_t=0"), Some(0.0));
    }

    #[test]
    fn rejects_negative_t() {
        let ctx = ModelContext::unit(1, 11).unwrap();
        let r = ctx.reference_potential();
        assert!(perturbation_scan(&ctx, r, &[-1.0], 0.25, Nodewise::Assert, "").is_err());
    }
}
