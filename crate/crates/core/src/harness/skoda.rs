//! Empirical stand-in for the uniform Skoda integrability constants.

use serde::Serialize;

use crate::context::ModelContext;
use crate::error::Result;
use crate::grid::ScalarField;

use super::corpus::{log_sum_exp, random_affines, rng, Affine};

/// Bound `C₀` imposed on every probe integral.
pub const SKODA_BOUND: f64 = 1e3;

/// Dyadic exponents scanned for `c₀`, from the largest down.
const K_MAX: i32 = 10;
const K_MIN: i32 = -20;

/// Fitted pair `(c₀, C₀)`: `c₀` is the largest `2^k`, `k ∈ [−20, 10]`,
/// with `∫ e^{−c₀ h} ρ ≤ C₀` for every probe `h`.
#[derive(Debug, Clone, Serialize)]
pub struct SkodaSurrogate {
    pub c0: f64,
    pub big_c0: f64,
    /// Largest probe integral at `c₀`.
    pub worst: f64,
    /// Smallest probe minimum (all probes have `sup h = 0`).
    pub deepest: f64,
    pub probes: usize,
    pub seed: u64,
}

impl SkodaSurrogate {
    /// `C = C₀ (e^{c₀} + 1)`.
    pub fn mt_constant(&self) -> f64 {
        self.big_c0 * (self.c0.exp() + 1.0)
    }

    /// `S = (2 log C / c₀)^n`.
    pub fn profile_constant(&self, n: usize) -> f64 {
        (2.0 * self.mt_constant().ln() / self.c0).powi(n as i32)
    }
}

/// Probe `h = U − r`, shifted to `sup h = 0`, as node values weighted by `ρ`.
fn probe(ctx: &ModelContext, big_u: &ScalarField) -> Vec<f64> {
    let r = ctx.reference_potential();
    let h: Vec<f64> = (0..big_u.domain().len())
        .map(|i| big_u.value(i) - r.value(i))
        .collect();
    let top = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    h.into_iter().map(|v| v - top).collect()
}

fn integral(h: &[f64], rho: &[f64], c: f64) -> f64 {
    h.iter().zip(rho).map(|(v, w)| (-c * v).exp() * w).sum()
}

/// Fits `c₀` on `probes` seeded random maxima of affine functions plus the
/// affine functions with corner slopes, which reach deepest below their sup.
pub fn skoda_surrogate(ctx: &ModelContext, probes: usize, seed: u64) -> Result<SkodaSurrogate> {
    let mut rng = rng(seed);
    let mut hs: Vec<Vec<f64>> = Vec::with_capacity(probes + 5);
    let body = ctx.body();
    let corners: Vec<[f64; 2]> = match ctx.dim() {
        1 => vec![[body.lo()[0], 0.0], [body.hi()[0], 0.0]],
        _ => vec![
            body.lo(),
            body.hi(),
            [body.lo()[0], body.hi()[1]],
            [body.hi()[0], body.lo()[1]],
        ],
    };
    for slope in corners.into_iter().chain(std::iter::once([0.0, 0.0])) {
        let pieces = [Affine { slope, offset: 0.0 }];
        hs.push(probe(ctx, &log_sum_exp(ctx, &pieces, 0.0)));
    }
    for _ in 0..probes {
        let pieces = random_affines(ctx, &mut rng, 12);
        hs.push(probe(ctx, &log_sum_exp(ctx, &pieces, 0.0)));
    }
    let rho = ctx.reference_density().weights();
    let deepest = hs
        .iter()
        .flat_map(|h| h.iter().copied())
        .fold(0.0, f64::min);
    let mut c0 = 2f64.powi(K_MIN);
    let mut worst = hs.iter().map(|h| integral(h, rho, c0)).fold(0.0, f64::max);
    for k in (K_MIN..=K_MAX).rev() {
        let c = 2f64.powi(k);
        let w = hs.iter().map(|h| integral(h, rho, c)).fold(0.0, f64::max);
        if w <= SKODA_BOUND {
            c0 = c;
            worst = w;
            break;
        }
    }
    Ok(SkodaSurrogate {
        c0,
        big_c0: SKODA_BOUND,
        worst,
        deepest,
        probes: hs.len(),
        seed,
    })
}
