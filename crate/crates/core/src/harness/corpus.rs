//! Seeded generators for admissible potentials.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::context::ModelContext;
use crate::error::Result;
use crate::grid::{sup_rel, ScalarField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `x ↦ a·x + b`.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub slope: [f64; 2],
    pub offset: f64,
}

/// Up to `max_pieces` affine functions with slopes drawn uniformly from the
/// gradient body and offsets in `[-0.5, 0.5]`.
pub fn random_affines(ctx: &ModelContext, rng: &mut ChaCha8Rng, max_pieces: usize) -> Vec<Affine> {
    let k = rng.gen_range(1..=max_pieces.max(1));
    let body = ctx.body();
    (0..k)
        .map(|_| {
            let mut slope = [0.0; 2];
            for (axis, s) in slope.iter_mut().enumerate().take(ctx.dim()) {
                let (lo, hi) = body.bounds(axis);
                *s = rng.gen_range(lo..=hi);
            }
            Affine {
                slope,
                offset: rng.gen_range(-0.5..=0.5),
            }
        })
        .collect()
}

/// `s log Σ exp(ℓ_k / s)`, or `max ℓ_k` for `s = 0`. The gradient stays in
/// the convex hull of the slopes, so the result is admissible.
pub fn log_sum_exp(ctx: &ModelContext, pieces: &[Affine], s: f64) -> ScalarField {
    ScalarField::from_fn(*ctx.domain(), |x| {
        let vals: Vec<f64> = pieces
            .iter()
            .map(|p| p.slope[0] * x[0] + p.slope[1] * x[1] + p.offset)
            .collect();
        let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if s == 0.0 {
            top
        } else {
            top + s * vals.iter().map(|v| ((v - top) / s).exp()).sum::<f64>().ln()
        }
    })
}

/// Shifts `u` so that `sup(u − φ) = −1`.
pub fn normalize(u: &ScalarField, phi: &ScalarField) -> Result<ScalarField> {
    Ok(u.shift(-1.0 - sup_rel(u, phi)?))
}

/// One `(u, φ)` pair of the fuzz corpus.
#[derive(Debug, Clone)]
pub struct Item {
    pub label: String,
    pub phi: ScalarField,
    pub u: ScalarField,
}

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub count: usize,
    pub max_pieces: usize,
    /// Smoothing scales cycled through the corpus (`0` = plain maximum).
    pub smoothing: Vec<f64>,
    /// Every `masked_every`-th item gets a few masked interior nodes
    /// (`0` disables masks).
    pub masked_every: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 10,
            max_pieces: 12,
            smoothing: vec![0.0, 0.05, 0.2],
            masked_every: 3,
        }
    }
}

/// Interior nodes masked for a singular model potential.
fn random_mask(ctx: &ModelContext, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let d = ctx.domain();
    let mut mask = vec![false; d.len()];
    let k = rng.gen_range(1..=3);
    let mut placed = 0;
    while placed < k {
        let i = rng.gen_range(0..d.len());
        if !d.is_boundary(i) && !mask[i] {
            mask[i] = true;
            placed += 1;
        }
    }
    mask
}

/// Fuzz corpus: `φ` is the reference potential (masked on a few interior
/// nodes for some items, which keeps it a model potential) and `u` a
/// smoothed maximum of affine functions with the same mask, normalized by
/// `sup(u − φ) = −1`.
pub fn fuzz_corpus(ctx: &ModelContext, spec: &CorpusSpec, seed: u64) -> Result<Vec<Item>> {
    let mut rng = rng(seed);
    let smoothing = if spec.smoothing.is_empty() {
        vec![0.0]
    } else {
        spec.smoothing.clone()
    };
    let mut out = Vec::with_capacity(spec.count);
    for k in 0..spec.count {
        let s = smoothing[k % smoothing.len()];
        let pieces = random_affines(ctx, &mut rng, spec.max_pieces);
        let raw = log_sum_exp(ctx, &pieces, s);
        let masked = spec.masked_every > 0 && k % spec.masked_every == spec.masked_every - 1;
        let (phi, raw) = if masked {
            let mask = random_mask(ctx, &mut rng);
            (
                ctx.reference_potential().clone().with_mask(&mask)?,
                raw.with_mask(&mask)?,
            )
        } else {
            (ctx.reference_potential().clone(), raw)
        };
        let u = normalize(&raw, &phi)?;
        out.push(Item {
            label: format!(
                "d{}-{k}-s{s}-k{}{}",
                ctx.dim(),
                pieces.len(),
                if masked { "-m" } else { "" }
            ),
            phi,
            u,
        });
    }
    Ok(out)
}
