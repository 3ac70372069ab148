use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{check_domains, sup_rel, DiscreteMeasure, ScalarField};

use super::weight::Weight;

/// Output of [`construct_weight`].
#[derive(Debug, Clone, Serialize)]
pub struct ConstructedWeight {
    pub weight: Weight,
    /// `t_1 = 1 < t_2 < … < t_K`, with `ψ(t_k) ≥ k`.
    pub breakpoints: Vec<f64>,
    /// Largest gap `t*` (after normalization).
    pub t_star: f64,
    /// `∫ χ(φ − u) dμ`, summed node by node.
    pub integral: f64,
    /// `χ(1) + Σ_{k ≤ K} k^{-2}`.
    pub bound: f64,
}

impl ConstructedWeight {
    pub fn k_count(&self) -> usize {
        if self.t_star > 1.0 {
            self.breakpoints.len()
        } else {
            0
        }
    }
}

fn same_level(a: f64, b: f64) -> bool {
    (b - a).abs() <= 1e-12 * a.abs().max(1.0)
}

/// Builds a weight `χ` with `∫ χ(φ − u) dμ ≤ χ(1) + Σ k^{-2}`.
///
/// `u` is shifted so that `sup(u − φ) = −1`, `μ` is normalized. With
/// `M(s) = μ(φ − u > s)` and `ψ = 1/M`, the weight is
/// `χ(t) = ∫_0^t h ψ`, where `h = 1` on `[0, 1)`,
/// `h = k^{-2} / (t_{k+1} − t_k)` on `[t_k, t_{k+1})` and the last piece
/// ends at `t*`. Beyond `t*` the weight continues with its last slope.
pub fn construct_weight(
    u: &ScalarField,
    phi: &ScalarField,
    mu: &DiscreteMeasure,
) -> Result<ConstructedWeight> {
    check_domains(u.domain(), phi.domain())?;
    check_domains(u.domain(), mu.domain())?;
    let mu = mu.normalized()?;
    let shift = -1.0 - sup_rel(u, phi)?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (i, &w) in mu.weights().iter().enumerate() {
        if w == 0.0 || phi.is_masked(i) {
            continue;
        }
        if u.is_masked(i) {
            return Err(Error::InfiniteIntegrand(i));
        }
        pts.push((phi.value(i) - u.value(i) - shift, w));
    }
    if pts.is_empty() {
        return Err(Error::ZeroMass);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // distinct gap levels with the mass strictly above each; gaps that
    // differ by rounding only share a level, else the table loses strictness
    let mut levels: Vec<f64> = Vec::new();
    let mut at: Vec<f64> = Vec::new();
    for (g, w) in pts.iter_mut() {
        match levels.last() {
            Some(&l) if same_level(l, *g) => {
                *g = l;
                *at.last_mut().unwrap() += *w;
            }
            _ => {
                levels.push(*g);
                at.push(*w);
            }
        }
    }
    let total: f64 = at.iter().sum();
    let mut above = vec![0.0; levels.len()];
    let mut acc = 0.0;
    for l in (0..levels.len()).rev() {
        above[l] = acc;
        acc += at[l];
    }
    let t_star = *levels.last().unwrap();
    // M(s) = μ(gap > s)
    let tail = |s: f64| -> f64 {
        match levels.partition_point(|g| *g <= s) {
            0 => total,
            l => above[l - 1],
        }
    };

    let mut ts = vec![1.0];
    if t_star > 1.0 {
        let dt = 1e-9 * t_star;
        let mut k = 2usize;
        loop {
            let cand = levels
                .iter()
                .zip(&above)
                .find(|(_, a)| **a * k as f64 <= 1.0)
                .map(|(g, _)| *g)
                .unwrap_or(t_star);
            let tk = cand.max(ts[k - 2] + dt);
            if tk >= t_star || k > 1_000_000 {
                break;
            }
            ts.push(tk);
            k += 1;
        }
    }

    // h on [a, b) for the piece containing `mid`
    let h = |mid: f64| -> f64 {
        if mid < 1.0 || t_star <= 1.0 {
            return 1.0;
        }
        let k = ts.partition_point(|t| *t <= mid);
        let end = if k < ts.len() { ts[k] } else { t_star };
        1.0 / ((k * k) as f64 * (end - ts[k - 1]))
    };
    let mut knots: Vec<f64> = vec![0.0, 1.0];
    knots.extend(ts.iter().copied());
    knots.extend(levels.iter().copied().filter(|g| *g > 1.0 && *g < t_star));
    if t_star > 1.0 {
        knots.push(t_star);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|b, a| same_level(*a, *b));
    let mut samples = vec![(0.0, 0.0)];
    let mut chi = 0.0;
    for w in knots.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        chi += (w[1] - w[0]) * h(mid) / tail(mid);
        samples.push((w[1], chi));
    }
    let weight = Weight::table(samples)?;
    let integral = pts.iter().map(|(g, w)| weight.eval(*g) * w).sum();
    let kk = if t_star > 1.0 { ts.len() } else { 0 };
    let bound = weight.eval(1.0) + (1..=kk).map(|k| 1.0 / (k * k) as f64).sum::<f64>();
    Ok(ConstructedWeight {
        weight,
        breakpoints: ts,
        t_star,
        integral,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;

    #[test]
    fn bounded_gap_is_linear() {
        let d = GridDomain::symmetric(1, 21).unwrap();
        let phi = ScalarField::from_fn(d, |x| x[0] * x[0]);
        let u = phi.shift(-1.0);
        let c = construct_weight(&u, &phi, &DiscreteMeasure::uniform(d)).unwrap();
        assert_eq!(c.k_count(), 0);
        for t in [0.5, 1.0, 4.0] {
            assert!((c.weight.eval(t) - t).abs() < 1e-12);
        }
        assert!((c.integral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        // gaps 1 + j δ with μ(gap ≥ t) ≈ e^{-(t-1)}
        let n = 4001;
        let d = GridDomain::new(1, &[(0.0, 1.0)], n).unwrap();
        let delta = 0.01;
        let phi = ScalarField::constant(d, 0.0);
        let u = ScalarField::from_fn(d, |x| -1.0 - x[0] * (n - 1) as f64 * delta);
        let w: Vec<f64> = (0..n)
            .map(|j| (-(j as f64) * delta).exp() * (1.0 - (-delta).exp()))
            .collect();
        let mu = DiscreteMeasure::new(d, w).unwrap();
        let c = construct_weight(&u, &phi, &mu).unwrap();
        let k = c.k_count();
        assert!(k > 10);
        // ψ(t) ≈ e^{t-1} so t_k ≈ 1 + log k
        for (j, t) in c.breakpoints.iter().enumerate().skip(1).take(15) {
            let kk = (j + 1) as f64;
            assert!((t - 1.0 - kk.ln()).abs() < 0.05, "k={kk} t={t}");
        }
        let series: f64 = (1..=k).map(|k| 1.0 / (k * k) as f64).sum();
        assert!((c.bound - c.weight.eval(1.0) - series).abs() < 1e-12);
        assert!((c.integral - c.bound).abs() < 1e-6);
        assert!((c.weight.eval(1.0) - 1.0).abs() < 1e-12);
    }
}
