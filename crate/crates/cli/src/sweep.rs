//! Cross-product sweeps: one CSV row of scalars per cell.

use std::io::Write;

use torapot::functionals::{energy_p, entropy, tau2_at_one};
use torapot::grid::gaps;
use torapot::harness::families::{separable, Bump};
use torapot::harness::perturbation::l_bar;
use torapot::monge_ampere::perturbed_ma;
use torapot::{Result as CoreResult, Weight};

use crate::config::{Config, SweepSpec};
use crate::output::{cell, CSV_HEADER};
use crate::pool::run_indexed;

pub const COLUMNS: [&str; 9] = [
    "resolution",
    "p",
    "beta",
    "t",
    "energy",
    "entropy",
    "tau2_at_one",
    "profile_integral",
    "s_surrogate",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub resolution: usize,
    pub p: f64,
    pub beta: f64,
    pub t: f64,
    pub energy: f64,
    pub entropy: f64,
    pub tau2_at_one: f64,
    pub profile_integral: f64,
    pub s_surrogate: f64,
}

fn or<T: Copy>(v: &[T], d: T) -> Vec<T> {
    if v.is_empty() {
        vec![d]
    } else {
        v.to_vec()
    }
}

/// Cells in row-major order of (resolution, p, beta, t).
pub fn cells(cfg: &Config, s: &SweepSpec) -> Vec<(usize, f64, f64, f64)> {
    let base = cfg.context.list()[0].resolution;
    let mut out = Vec::new();
    for r in or(&s.resolution, base) {
        for p in or(&s.p, 1.0) {
            for b in or(&s.beta, 2.0) {
                for t in or(&s.t, 0.0) {
                    out.push((r, p, b, t));
                }
            }
        }
    }
    out
}

fn evaluate(
    cfg: &Config,
    s: &SweepSpec,
    (res, p, beta, t): (usize, f64, f64, f64),
) -> CoreResult<Row> {
    let ctx = cfg.context.list()[0]
        .with_resolution(res)
        .build()
        .map_err(|e| torapot::Error::Invalid(e.to_string()))?;
    let n = ctx.dim();
    let bump = Bump::new(s.bump[0], s.bump[1])?;
    let u = separable(&ctx, &vec![bump; n])?;
    let phi = ctx.reference_potential();
    let energy = energy_p(&ctx, &u, phi, p)?.to_f64();
    let ent = entropy(&ctx, &u)?.to_f64();
    let chi1 = Weight::power(p)?;
    let a = (ctx.volume() / (beta * energy)).powf(1.0 / n as f64);
    let tau = tau2_at_one(&chi1, n, a)?;
    let chi2 = chi1.chi2(n)?;
    let rho = ctx.reference_density().weights();
    let profile = gaps(&u, phi)?
        .iter()
        .zip(rho)
        .map(|(g, w)| g.map_or(0.0, |g| chi2.eval(g) * w))
        .sum();
    let pert = perturbed_ma(&ctx, &u, t)?;
    let s_sur = pert
        .s_direct
        .iter()
        .zip(rho)
        .map(|(s, w)| l_bar(*s) * w)
        .sum();
    Ok(Row {
        resolution: res,
        p,
        beta,
        t,
        energy,
        entropy: ent,
        tau2_at_one: tau,
        profile_integral: profile,
        s_surrogate: s_sur,
    })
}

pub fn run_sweep(cfg: &Config, jobs: usize) -> CoreResult<Vec<Row>> {
    let s = cfg
        .sweep
        .clone()
        .ok_or_else(|| torapot::Error::Invalid("config has no sweep section".into()))?;
    let list = cells(cfg, &s);
    run_indexed(jobs, list.len(), |i| evaluate(cfg, &s, list[i]))
        .into_iter()
        .collect()
}

pub fn rows_csv(rows: &[Row]) -> Result<Vec<u8>, csv::Error> {
    let mut buf = Vec::new();
    writeln!(buf, "{CSV_HEADER}")?;
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.resolution.to_string(),
            cell(r.p),
            cell(r.beta),
            cell(r.t),
            cell(r.energy),
            cell(r.entropy),
            cell(r.tau2_at_one),
            cell(r.profile_integral),
            cell(r.s_surrogate),
        ])?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}
