//! Exploratory search: does finite entropy survive the perturbation by
//! `ε r` for small `ε`, and which inputs make it grow fastest? The output
//! only ranks candidates; it makes no claim either way.

use std::time::Instant;

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::functionals::{entropy, rel_entropy};
use crate::grid::{DiscreteMeasure, ScalarField};
use crate::monge_ampere::{mixed_family, perturbed_with};

use super::report::{CertificateReport, Digest};

/// Theorem id of exploratory reports. They carry no assertions, and
/// consumers print them as `EXPLORATORY` rather than pass or fail.
pub const EXPLORATORY: &str = "explore_stability";

/// Entropy of `MA(u + ε r)` relative to the perturbed reference, for each
/// `ε`. On the grid this is always finite; the interesting quantity is the
/// ratio to the unperturbed entropy as `ε → 0`.
pub fn perturbed_entropies(ctx: &ModelContext, u: &ScalarField, eps: &[f64]) -> Result<Vec<f64>> {
    let family = mixed_family(ctx, u)?;
    let refw = DiscreteMeasure::new(*ctx.domain(), ctx.reference_ma().to_vec())?;
    eps.iter()
        .map(|&e| {
            let p = perturbed_with(ctx, u, e, &family)?;
            let mu = DiscreteMeasure::new(*ctx.domain(), p.direct)?;
            Ok(rel_entropy(&mu, &refw, true)?.to_f64())
        })
        .collect()
}

/// Ranks `candidates` by the largest `Ent_ε / (1 + Ent_0)` over `eps`.
pub fn explore_stability(
    ctx: &ModelContext,
    candidates: &[(String, ScalarField)],
    eps: &[f64],
    label: &str,
) -> Result<CertificateReport> {
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::Invalid(
            "exploration needs positive finite eps".into(),
        ));
    }
    let start = Instant::now();
    let mut digest = Digest::default().str(EXPLORATORY).floats(eps);
    let mut scored = Vec::new();
    for (name, u) in candidates {
        digest = digest.field(u);
        let base = entropy(ctx, u)?;
        if !base.is_finite() {
            continue;
        }
        let base = base.to_f64();
        let ents = perturbed_entropies(ctx, u, eps)?;
        let growth = ents.iter().map(|e| e / (1.0 + base)).fold(0.0, f64::max);
        scored.push((growth, name.clone(), base, ents));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut rep = CertificateReport::new(EXPLORATORY, label, digest.finish(), 0);
    rep.constant("candidates", candidates.len() as f64);
    rep.constant("finite_entropy_candidates", scored.len() as f64);
    for (rank, (growth, name, base, ents)) in scored.iter().take(5).enumerate() {
        rep.empirical(&format!("rank{rank}_growth[{name}]"), *growth);
        rep.empirical(&format!("rank{rank}_entropy[{name}]"), *base);
        for (e, v) in eps.iter().zip(ents) {
            rep.empirical(&format!("rank{rank}_entropy_eps={e}"), *v);
        }
    }
    rep.wall_time = start.elapsed();
    Ok(rep)
}
