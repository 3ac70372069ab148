//! Potential families with finite entropy.

use rand::Rng;
use serde::Serialize;

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::grid::ScalarField;

use super::corpus::{normalize, rng};

/// Parameters of `(1 − κ) r + κ b_w` on one axis, where `b_w` has the same
/// slope range as `r` but gets it on `[−w, w]`: its second derivative is a
/// plateau of height `~1/w`, a density blow-up on a shrinking interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub kappa: f64,
    pub width: f64,
}

impl Bump {
    pub fn new(kappa: f64, width: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) || !(width > 0.0) {
            return Err(Error::Invalid(format!(
                "bump needs kappa in [0, 1] and width > 0, got {kappa}, {width}"
            )));
        }
        Ok(Bump { kappa, width })
    }

    /// Value at `x` on an axis with domain `[xa, xb]` and reference
    /// curvature `lambda`.
    fn eval(&self, x: f64, xa: f64, xb: f64, lambda: f64) -> f64 {
        let w = self.width;
        let end = if x >= 0.0 { xb.max(0.0) } else { -xa.min(0.0) };
        let t = x.abs();
        let b = if t <= w {
            end * t * t / (2.0 * w)
        } else {
            end * (t - 0.5 * w)
        };
        (1.0 - self.kappa) * 0.5 * lambda * x * x + self.kappa * lambda * b
    }
}

/// Separable potential `Σ_axes bump_axis(x_axis)`, normalized against the
/// reference potential by `sup(u − r) = −1`. Each factor is convex with
/// slopes inside those of `r`, so the result is admissible.
pub fn separable(ctx: &ModelContext, bumps: &[Bump]) -> Result<ScalarField> {
    if bumps.len() != ctx.dim() {
        return Err(Error::BoundsArity {
            expected: ctx.dim(),
            got: bumps.len(),
        });
    }
    let d = *ctx.domain();
    let lambda = ctx.lambda();
    let u = ScalarField::from_fn(d, |x| {
        (0..d.dim())
            .map(|a| {
                let (xa, xb) = d.bounds(a);
                bumps[a].eval(x[a], xa, xb, lambda[a])
            })
            .sum()
    });
    normalize(&u, ctx.reference_potential())
}

/// Seeded bump parameters: `κ ∈ [0.1, 0.9]`, `w ∈ [2h, 0.6]` per axis.
pub fn random_bumps(ctx: &ModelContext, count: usize, seed: u64) -> Vec<Vec<Bump>> {
    let mut rng = rng(seed);
    let h = (0..ctx.dim())
        .map(|a| ctx.domain().spacing(a))
        .fold(0.0, f64::max);
    (0..count)
        .map(|_| {
            (0..ctx.dim())
                .map(|_| Bump {
                    kappa: rng.gen_range(0.1..=0.9),
                    width: rng.gen_range((2.0 * h).min(0.6)..=0.6),
                })
                .collect()
        })
        .collect()
}

/// Grid of bump parameters used for the entropy-budget family: every
/// `κ` paired with every width on both axes.
pub fn bump_grid(dim: usize, kappas: &[f64], widths: &[f64]) -> Vec<Vec<Bump>> {
    let one: Vec<Bump> = kappas
        .iter()
        .flat_map(|&kappa| widths.iter().map(move |&width| Bump { kappa, width }))
        .collect();
    if dim == 1 {
        return one.into_iter().map(|b| vec![b]).collect();
    }
    let mut out = Vec::new();
    for (k, a) in one.iter().enumerate() {
        // pair each factor with a shifted partner, keeping the family small
        out.push(vec![*a, one[(k * 7 + 3) % one.len()]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::is_convex;
    use crate::functionals::{check_membership, entropy};

    #[test]
    fn bump_family_is_admissible_with_finite_entropy() {
        for dim in [1, 2] {
            let ctx = ModelContext::unit(dim, if dim == 1 { 101 } else { 17 }).unwrap();
            for bumps in random_bumps(&ctx, 5, 2) {
                let u = separable(&ctx, &bumps).unwrap();
                assert!(is_convex(&u));
                check_membership(&ctx, &u, ctx.reference_potential()).unwrap();
                assert!(entropy(&ctx, &u).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn kappa_zero_is_reference() {
        let ctx = ModelContext::unit(2, 9).unwrap();
        let b = Bump::new(0.0, 0.3).unwrap();
        let u = separable(&ctx, &[b, b]).unwrap();
        let r = ctx.reference_potential();
        for i in 0..u.domain().len() {
            assert!((u.value(i) - r.value(i) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn narrow_bump_raises_entropy() {
        let ctx = ModelContext::unit(1, 401).unwrap();
        let e = |w: f64| {
            let u = separable(&ctx, &[Bump::new(0.5, w).unwrap()]).unwrap();
            entropy(&ctx, &u).unwrap().to_f64()
        };
        assert!(e(0.05) > e(0.2));
        assert!(e(0.2) > e(0.8));
    }
}
