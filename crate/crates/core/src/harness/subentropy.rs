//! Sub-additivity of relative entropy under a bounded change of reference,
//! and invariance under relabeling of the nodes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::functionals::rel_entropy;
use crate::grid::{DiscreteMeasure, GridDomain};

use super::corpus::rng;
use super::report::{CertificateReport, Digest};

/// `Ent(μ₁, μ₃) ≤ Ent(μ₁, μ₂) + log sup(μ₂ / μ₃)` and
/// `Ent(μ₁, μ₃) = Ent(π μ₁, π μ₃)` for a seeded permutation `π`.
pub fn subentropy_check(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    mu3: &DiscreteMeasure,
    seed: u64,
    label: &str,
) -> Result<CertificateReport> {
    let mut sup_f2 = 0.0f64;
    for (i, (a, b)) in mu2.weights().iter().zip(mu3.weights()).enumerate() {
        if *a > 0.0 {
            if *b <= 0.0 {
                return Err(Error::UnboundedRatio(i));
            }
            sup_f2 = sup_f2.max(a / b);
        }
    }
    let digest = Digest::default()
        .str("subentropy")
        .floats(mu1.weights())
        .floats(mu2.weights())
        .floats(mu3.weights())
        .finish();
    let mut rep = CertificateReport::new("subentropy", label, digest, seed);
    let e13 = rel_entropy(mu1, mu3, false)?.to_f64();
    let e12 = rel_entropy(mu1, mu2, false)?.to_f64();
    rep.constant("sup_f2", sup_f2);
    rep.le("sub_entropy", e13, e12 + sup_f2.ln(), 1e-12);

    let mut perm: Vec<usize> = (0..mu1.weights().len()).collect();
    perm.shuffle(&mut rng(seed));
    let permute = |m: &DiscreteMeasure| -> Result<DiscreteMeasure> {
        let w = perm.iter().map(|&k| m.weight(k)).collect();
        DiscreteMeasure::new(*m.domain(), w)
    };
    let moved = rel_entropy(&permute(mu1)?, &permute(mu3)?, false)?.to_f64();
    rep.le("relabel_invariance", (moved - e13).abs(), 0.0, 0.0);
    Ok(rep)
}

/// Random triple on `domain`: `μ₃` with positive weights, `μ₂ = f₂ μ₃` with
/// `f₂ ∈ [¼, 4]` before normalization, `μ₁` with some zero weights.
pub fn random_triple(
    domain: GridDomain,
    seed: u64,
) -> Result<(DiscreteMeasure, DiscreteMeasure, DiscreteMeasure)> {
    let mut r = rng(seed);
    let n = domain.len();
    let w3: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
    let w2: Vec<f64> = w3.iter().map(|w| w * r.gen_range(0.25..=4.0)).collect();
    let w1: Vec<f64> = (0..n)
        .map(|_| {
            if r.gen_bool(0.2) {
                0.0
            } else {
                r.gen_range(0.0..1.0)
            }
        })
        .collect();
    let mu3 = DiscreteMeasure::new(domain, w3)?.normalized()?;
    let mu2 = DiscreteMeasure::new(domain, w2)?.normalized()?;
    let mu1 = DiscreteMeasure::new(domain, w1)?.normalized()?;
    Ok((mu1, mu2, mu3))
}
