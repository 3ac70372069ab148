//! Alexandrov Monge-Ampere measures, densities, mixed and perturbed measures.

use crate::body::GradientBody;
use crate::cells;
use crate::context::ModelContext;
use crate::convex::{convexity_gap, is_convex};
use crate::error::{Error, Result};
use crate::grid::{check_domains, DiscreteMeasure, ScalarField};

/// A node is an atom when its cell exceeds this multiple of the reference
/// cell.
pub const ATOM_RATIO: f64 = 50.0;

/// Alexandrov measure together with the clamping flag.
#[derive(Debug, Clone)]
pub struct Alexandrov {
    pub measure: DiscreteMeasure,
    /// Some discrete slope of the input left the gradient body; the measure
    /// is then that of the constrained envelope.
    pub clamped: bool,
}

fn validate(ctx: &ModelContext, u: &ScalarField) -> Result<()> {
    check_domains(ctx.domain(), u.domain())?;
    if u.unmasked().next().is_none() {
        return Err(Error::AllMasked);
    }
    if !is_convex(u) {
        return Err(Error::NotConvex(convexity_gap(u)));
    }
    Ok(())
}

/// Cell areas of `u` in `body` without any input checks.
pub(crate) fn weights_in(u: &ScalarField, body: &GradientBody) -> Vec<f64> {
    cells::complex(u, body).areas()
}

/// Alexandrov measure of a convex field; masked nodes carry no mass.
pub fn ma_measure(ctx: &ModelContext, u: &ScalarField) -> Result<DiscreteMeasure> {
    Ok(ma_measure_flagged(ctx, u)?.measure)
}

pub fn ma_measure_flagged(ctx: &ModelContext, u: &ScalarField) -> Result<Alexandrov> {
    validate(ctx, u)?;
    let cx = cells::complex(u, ctx.body());
    Ok(Alexandrov {
        measure: DiscreteMeasure::new(*u.domain(), cx.areas())?,
        clamped: cx.clamped,
    })
}

/// Measure of a field already known to be convex and admissible.
pub(crate) fn ma_trusted(ctx: &ModelContext, u: &ScalarField) -> Result<DiscreteMeasure> {
    check_domains(ctx.domain(), u.domain())?;
    if u.unmasked().next().is_none() {
        return Err(Error::AllMasked);
    }
    DiscreteMeasure::new(*u.domain(), weights_in(u, ctx.body()))
}

pub fn mass(ctx: &ModelContext, u: &ScalarField) -> Result<f64> {
    Ok(ma_measure(ctx, u)?.total())
}

/// Split of `MA(u)` into a part with density and atoms.
#[derive(Debug, Clone)]
pub struct MaDensity {
    /// Absolutely continuous part; its density is taken with respect to the
    /// reference probability `ρ`.
    pub measure: DiscreteMeasure,
    /// Density with respect to the raw reference measure `MA(r)`.
    pub raw_density: Vec<f64>,
    pub atoms: Vec<bool>,
    pub total: f64,
}

impl MaDensity {
    pub fn singular_mass(&self) -> f64 {
        self.measure.singular_mass()
    }

    pub fn density(&self) -> &[f64] {
        self.measure.density().expect("density is always set")
    }
}

pub(crate) fn split_density(ctx: &ModelContext, weights: &[f64]) -> Result<MaDensity> {
    let refw = ctx.reference_ma();
    let rho = ctx.reference_density().weights();
    let n = weights.len();
    let mut ac = vec![0.0; n];
    let mut dens = vec![0.0; n];
    let mut raw = vec![0.0; n];
    let mut atoms = vec![false; n];
    let mut singular = 0.0;
    for i in 0..n {
        let w = weights[i];
        if w > ATOM_RATIO * refw[i] {
            atoms[i] = true;
            singular += w;
        } else {
            ac[i] = w;
            dens[i] = w / rho[i];
            raw[i] = w / refw[i];
        }
    }
    let total = weights.iter().sum();
    let mut measure = DiscreteMeasure::with_singular(*ctx.domain(), ac, singular)?;
    measure.set_density(dens);
    Ok(MaDensity {
        measure,
        raw_density: raw,
        atoms,
        total,
    })
}

pub fn ma_density(ctx: &ModelContext, u: &ScalarField) -> Result<MaDensity> {
    let mu = ma_measure(ctx, u)?;
    split_density(ctx, mu.weights())
}

/// Mixed measure with `j` copies of `u` (slopes in `bu`) and `n − j`
/// copies of `v` (slopes in `bv`), by polarization.
pub fn mixed_ma_in(
    u: &ScalarField,
    bu: &GradientBody,
    v: &ScalarField,
    bv: &GradientBody,
    j: usize,
) -> Result<Vec<f64>> {
    check_domains(u.domain(), v.domain())?;
    let n = u.domain().dim();
    if j > n {
        return Err(Error::MixedIndex { j, n });
    }
    if j == n {
        return Ok(weights_in(u, bu));
    }
    if j == 0 {
        return Ok(weights_in(v, bv));
    }
    // n = 2, j = 1
    let sum = u.add(v)?;
    let both = weights_in(&sum, &bu.minkowski_sum(bv)?);
    let wu = weights_in(u, bu);
    let wv = weights_in(v, bv);
    Ok((0..both.len())
        .map(|i| 0.5 * (both[i] - wu[i] - wv[i]))
        .collect())
}

/// Mixed measure of two potentials admissible for the context's body.
/// Node weights of the polarized measure may be slightly negative for
/// generic 2-D grids, so the result is returned as raw weights.
pub fn mixed_ma(
    ctx: &ModelContext,
    u: &ScalarField,
    v: &ScalarField,
    j: usize,
) -> Result<Vec<f64>> {
    validate(ctx, u)?;
    validate(ctx, v)?;
    mixed_ma_in(u, ctx.body(), v, ctx.body(), j)
}

fn binomial(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (2, 1) => 2.0,
        (1, 1) | (2, 2) => 1.0,
        _ => 0.0,
    }
}

/// `MA(u + t r)` computed directly and through the binomial expansion.
#[derive(Debug, Clone)]
pub struct Perturbed {
    pub t: f64,
    pub direct: Vec<f64>,
    pub expansion: Vec<f64>,
    /// Density of the direct measure with respect to `MA(r)`.
    pub s_direct: Vec<f64>,
    pub s_expansion: Vec<f64>,
}

impl Perturbed {
    pub fn total_gap(&self) -> f64 {
        (self.direct.iter().sum::<f64>() - self.expansion.iter().sum::<f64>()).abs()
    }

    /// `max_i |direct_i − expansion_i| / max(direct_i, MA(r)_i)`.
    pub fn nodewise_gap(&self, reference: &[f64]) -> f64 {
        (0..self.direct.len())
            .map(|i| {
                let scale = self.direct[i].max(reference[i]);
                (self.direct[i] - self.expansion[i]).abs() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Mixed measures `μ_j` of `u` and `r` (`j` copies of `u`), `j = 0..=n`.
pub fn mixed_family(ctx: &ModelContext, u: &ScalarField) -> Result<Vec<Vec<f64>>> {
    let q = ctx.reference_body();
    let r = ctx.reference_potential();
    (0..=ctx.dim())
        .map(|j| mixed_ma_in(u, ctx.body(), r, &q, j))
        .collect()
}

/// Perturbation of `u` by `t r` in the body `P + tQ`, with `Q` the slope
/// box of `r`.
pub fn perturbed_ma(ctx: &ModelContext, u: &ScalarField, t: f64) -> Result<Perturbed> {
    validate(ctx, u)?;
    perturbed_with(ctx, u, t, &mixed_family(ctx, u)?)
}

pub(crate) fn perturbed_with(
    ctx: &ModelContext,
    u: &ScalarField,
    t: f64,
    family: &[Vec<f64>],
) -> Result<Perturbed> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::NegativeParameter(t));
    }
    let n = ctx.dim();
    let direct = if t == 0.0 {
        weights_in(u, ctx.body())
    } else {
        let body = ctx.body().minkowski_sum(&ctx.reference_body().scaled(t)?)?;
        weights_in(&u.add(&ctx.reference_potential().scale(t))?, &body)
    };
    let len = direct.len();
    let mut expansion = vec![0.0; len];
    for (j, mu) in family.iter().enumerate() {
        let c = binomial(n, j) * t.powi((n - j) as i32);
        if c == 0.0 {
            continue;
        }
        for i in 0..len {
            expansion[i] += c * mu[i];
        }
    }
    let refw = ctx.reference_ma();
    let s_direct = (0..len).map(|i| direct[i] / refw[i]).collect();
    let s_expansion = (0..len).map(|i| expansion[i] / refw[i]).collect();
    Ok(Perturbed {
        t,
        direct,
        expansion,
        s_direct,
        s_expansion,
    })
}

/// Nodes of `set` whose whole Alexandrov star (for `u`) also lies in `set`.
/// On these nodes the cell of `u` is determined by values inside `set`.
pub fn star_interior(ctx: &ModelContext, u: &ScalarField, set: &[bool]) -> Result<Vec<bool>> {
    check_domains(ctx.domain(), u.domain())?;
    if set.len() != u.domain().len() {
        return Err(Error::DomainMismatch);
    }
    let cx = cells::complex_with(u, ctx.body(), true);
    Ok((0..set.len())
        .map(|i| {
            set[i]
                && match &cx.cells[i] {
                    Some(c) => c.star.iter().all(|&k| set[k]),
                    None => false,
                }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim1_examples() {
        let ctx = ModelContext::unit(1, 201).unwrap();
        let d = *ctx.domain();
        let cone = ScalarField::from_fn(d, |x| x[0].abs());
        let mu = ma_measure(&ctx, &cone).unwrap();
        assert!((mu.weight(100) - 2.0).abs() < 1e-12);
        assert_eq!(mu.weights().iter().filter(|w| **w > 0.0).count(), 1);
        let dens = ma_density(&ctx, &cone).unwrap();
        assert!((dens.singular_mass() - 2.0).abs() < 1e-12);
        assert!(dens.density().iter().all(|f| *f == 0.0));

        assert!((mass(&ctx, &ScalarField::constant(d, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        let r = ctx.reference_potential();
        let dr = ma_density(&ctx, r).unwrap();
        assert_eq!(dr.singular_mass(), 0.0);
        assert!(dr.density().iter().all(|f| (f - 2.0).abs() < 1e-12));
    }

    #[test]
    fn quadratic_mass_in_dim2() {
        let ctx = ModelContext::unit(2, 17).unwrap();
        let mu = ma_measure(&ctx, ctx.reference_potential()).unwrap();
        assert!((mu.total() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_convex() {
        let ctx = ModelContext::unit(1, 21).unwrap();
        let u = ScalarField::from_fn(*ctx.domain(), |x| -x[0] * x[0]);
        assert!(matches!(ma_measure(&ctx, &u), Err(Error::NotConvex(_))));
    }

    #[test]
    fn quartic_density_follows_second_derivative() {
        // u = x^4 / 12 has u'' = x^2, slopes in [-1/3, 1/3]
        let ctx = ModelContext::unit(1, 401).unwrap();
        let d = *ctx.domain();
        let u = ScalarField::from_fn(d, |x| x[0].powi(4) / 12.0);
        let dens = ma_density(&ctx, &u).unwrap();
        for i in 1..400 {
            let x = d.coords(i)[0];
            assert!((dens.raw_density[i] - x * x).abs() < 1e-4, "node {i}");
        }
    }

    #[test]
    fn mixed_of_equal_quadratics() {
        let ctx = ModelContext::unit(2, 9).unwrap();
        let r = ctx.reference_potential();
        let m = mixed_ma(&ctx, r, r, 1).unwrap();
        assert!((m.iter().sum::<f64>() - 4.0).abs() < 1e-10);
        for (a, b) in m.iter().zip(ctx.reference_ma()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            mixed_ma(&ctx, r, r, 3),
            Err(Error::MixedIndex { .. })
        ));
    }

    #[test]
    fn perturbation_of_reference() {
        let ctx = ModelContext::unit(2, 9).unwrap();
        let r = ctx.reference_potential();
        for t in [0.0, 0.25, 1.0, 4.0] {
            let p = perturbed_ma(&ctx, r, t).unwrap();
            for i in 0..p.direct.len() {
                assert!((p.s_direct[i] - (1.0 + t).powi(2)).abs() < 1e-10);
                assert!((p.s_expansion[i] - (1.0 + t).powi(2)).abs() < 1e-10);
            }
        }
        let p0 = perturbed_ma(&ctx, r, 0.0).unwrap();
        assert_eq!(p0.direct, ma_measure(&ctx, r).unwrap().weights());
    }
}
