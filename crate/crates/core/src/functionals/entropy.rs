use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::grid::{check_domains, DiscreteMeasure, ScalarField};
use crate::monge_ampere::{ma_measure, split_density};

use super::extended::Extended;

/// Relative singular mass above which the entropy is `+inf`.
const SINGULAR_TOL: f64 = 1e-8;

/// Sum in ascending order, so that permuting the terms cannot change the
/// rounding.
fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Entropy reported against the normalized reference `ρ` and against the
/// raw reference measure `MA(r)`; they differ by `log vol(body)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub normalized: Extended,
    pub raw: Extended,
}

/// `m^{-1} Σ f log f ρ − log m` for node weights `w = f ρ` of total `m`.
pub fn entropy_from_weights(ctx: &ModelContext, weights: &[f64]) -> Result<EntropyValue> {
    if weights.len() != ctx.domain().len() {
        return Err(Error::DomainMismatch);
    }
    let split = split_density(ctx, weights)?;
    let m = split.total;
    if m <= 0.0 {
        return Err(Error::ZeroMass);
    }
    if split.singular_mass() > SINGULAR_TOL * m {
        return Ok(EntropyValue {
            normalized: Extended::Infinite,
            raw: Extended::Infinite,
        });
    }
    let rho = ctx.reference_density().weights();
    let terms: Vec<f64> = weights
        .iter()
        .zip(rho)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, r)| (w / m) * (w / (m * r)).ln())
        .collect();
    let normalized = sorted_sum(terms).max(0.0);
    Ok(EntropyValue {
        normalized: Extended::Finite(normalized),
        raw: Extended::Finite(normalized - ctx.volume().ln()),
    })
}

/// Entropy of `MA(u)` relative to the reference volume.
pub fn entropy(ctx: &ModelContext, u: &ScalarField) -> Result<Extended> {
    Ok(entropy_raw(ctx, u)?.normalized)
}

pub fn entropy_raw(ctx: &ModelContext, u: &ScalarField) -> Result<EntropyValue> {
    let mu = ma_measure(ctx, u)?;
    entropy_from_weights(ctx, mu.weights())
}

/// Entropy of an arbitrary measure on the context's grid.
pub fn entropy_of_measure(ctx: &ModelContext, mu: &DiscreteMeasure) -> Result<Extended> {
    check_domains(ctx.domain(), mu.domain())?;
    if mu.singular_mass() > SINGULAR_TOL * mu.total() {
        return Ok(Extended::Infinite);
    }
    Ok(entropy_from_weights(ctx, mu.weights())?.normalized)
}

/// `Σ μ_i log(μ_i / ν_i)`; `+inf` if `μ` has a singular part or charges a
/// node where `ν` vanishes. Inputs must be probabilities unless
/// `normalize` is set.
pub fn rel_entropy(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    normalize: bool,
) -> Result<Extended> {
    check_domains(mu.domain(), nu.domain())?;
    let (mu, nu) = if normalize {
        (mu.normalized()?, nu.normalized()?)
    } else {
        for m in [mu, nu] {
            if (m.total() - 1.0).abs() > 1e-10 {
                return Err(Error::NotProbability(m.total()));
            }
        }
        (mu.clone(), nu.clone())
    };
    if mu.singular_mass() > 0.0 {
        return Ok(Extended::Infinite);
    }
    let mut terms = Vec::new();
    for (m, n) in mu.weights().iter().zip(nu.weights()) {
        if *m > 0.0 {
            if *n <= 0.0 {
                return Ok(Extended::Infinite);
            }
            terms.push(m * (m / n).ln());
        }
    }
    Ok(Extended::Finite(sorted_sum(terms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;

    #[test]
    fn reference_has_zero_entropy() {
        for (dim, res) in [(1, 101), (2, 9)] {
            let ctx = ModelContext::unit(dim, res).unwrap();
            let e = entropy(&ctx, ctx.reference_potential()).unwrap();
            assert!(e.to_f64().abs() < 1e-12);
        }
    }

    #[test]
    fn cone_has_infinite_entropy() {
        let ctx = ModelContext::unit(1, 101).unwrap();
        let u = ScalarField::from_fn(*ctx.domain(), |x| x[0].abs());
        assert_eq!(entropy(&ctx, &u).unwrap(), Extended::Infinite);
    }

    #[test]
    fn half_density_gives_log_two() {
        let ctx = ModelContext::unit(1, 201).unwrap();
        let d = *ctx.domain();
        let rho = ctx.reference_density();
        // density 2 on x < 0, 0 on x > 0, with the midpoint split evenly
        let f: Vec<f64> = (0..d.len())
            .map(|i| match d.coords(i)[0] {
                x if x < 0.0 => 2.0,
                0.0 => 1.0,
                _ => 0.0,
            })
            .collect();
        let mu = DiscreteMeasure::from_density(rho, f).unwrap();
        assert!((mu.total() - 1.0).abs() < 1e-12);
        let e = entropy_of_measure(&ctx, &mu).unwrap().to_f64();
        // the split node contributes ρ_0 · (1·log 1) instead of log 2
        let rho0 = rho.weight(100);
        assert!((e - (1.0 - rho0) * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let d = GridDomain::symmetric(1, 11).unwrap();
        let nu = DiscreteMeasure::uniform(d);
        assert_eq!(rel_entropy(&nu, &nu, false).unwrap(), Extended::Finite(0.0));
        let mut w = vec![0.0; 11];
        w[3] = 1.0;
        let atom = DiscreteMeasure::new(d, w.clone()).unwrap();
        let mut z = vec![0.1; 11];
        z[3] = 0.0;
        let hole = DiscreteMeasure::new(d, z).unwrap();
        assert_eq!(rel_entropy(&atom, &hole, true).unwrap(), Extended::Infinite);

        let f: Vec<f64> = (0..11)
            .map(|i| {
                if i < 5 {
                    0.5
                } else if i == 5 {
                    1.0
                } else {
                    1.5
                }
            })
            .collect();
        let mu = DiscreteMeasure::from_density(&nu, f.clone()).unwrap();
        let e = rel_entropy(&mu, &nu, false).unwrap().to_f64();
        let direct = (5.0 * 0.5 * 0.5f64.ln() + 5.0 * 1.5 * 1.5f64.ln()) / 11.0;
        assert!((e - direct).abs() < 1e-15);
        assert!(matches!(
            rel_entropy(&mu.scaled(2.0), &nu, false),
            Err(Error::NotProbability(_))
        ));
    }
}
