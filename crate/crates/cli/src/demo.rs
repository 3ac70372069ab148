//! Single certificates on bundled inputs, with a readable summary.

use std::fmt::Write;

use torapot::harness::corpus::{fuzz_corpus, CorpusSpec};
use torapot::harness::demo::{synthetic_tail, weight_construct_certificate};
use torapot::harness::families::{separable, Bump};
use torapot::harness::report::fmt_num;
use torapot::harness::{
    atomic_entropy_demo, inclusion_check, mt_certificate, perturbation_scan, skoda_surrogate,
    CertificateReport, Nodewise,
};
use torapot::monge_ampere::ma_measure;
use torapot::{ModelContext, Result as CoreResult, ScalarField, Weight};

pub const NAMES: [&str; 5] = ["no-ent", "mt", "inclusion", "weight-construct", "perturb"];

fn bump_2d(ctx: &ModelContext) -> CoreResult<ScalarField> {
    separable(ctx, &[Bump::new(0.5, 0.3)?, Bump::new(0.3, 0.5)?])
}

fn table(rep: &CertificateReport, out: &mut String) {
    for a in &rep.assertions {
        let _ = writeln!(
            out,
            "  {:<28} {:>14} <= {:<14} slack {:<12} {}",
            a.name,
            fmt_num(a.lhs),
            fmt_num(a.rhs),
            fmt_num(a.slack),
            if a.pass { "PASS" } else { "FAIL" }
        );
    }
    for e in rep.empirical.iter().chain(&rep.constants) {
        let _ = writeln!(out, "  {:<28} {}", e.name, fmt_num(e.value));
    }
}

/// Runs the named demo. `None` for an unknown name.
pub fn run_demo(name: &str, seed: u64) -> Option<CoreResult<(CertificateReport, String)>> {
    let run = || -> CoreResult<(CertificateReport, String)> {
        let mut out = String::new();
        let rep = match name {
            "no-ent" => {
                let ctx = ModelContext::unit(1, 201)?;
                let rep = atomic_entropy_demo(&ctx)?;
                let ent = rep.value("entropy").unwrap_or(f64::NAN);
                let same = rep
                    .assertions
                    .iter()
                    .any(|a| a.name == "same_singularity_type" && a.pass);
                let ent = if ent == f64::INFINITY {
                    "+INF".to_string()
                } else {
                    fmt_num(ent)
                };
                let _ = writeln!(
                    out,
                    "entropy = {ent}, singularity type = {}",
                    if same { "same" } else { "different" }
                );
                let _ = writeln!(
                    out,
                    "atom mass = {}, mollified entropy = {}",
                    fmt_num(rep.value("atom_mass").unwrap_or(f64::NAN)),
                    fmt_num(rep.value("mollified_entropy").unwrap_or(f64::NAN))
                );
                rep
            }
            "mt" => {
                let ctx = ModelContext::unit(2, 17)?;
                let sk = skoda_surrogate(&ctx, 200, seed)?;
                let u = bump_2d(&ctx)?;
                let rep = mt_certificate(
                    &ctx,
                    &u,
                    ctx.reference_potential(),
                    &Weight::power(2.0)?,
                    2.0,
                    &sk,
                    "bump",
                )?;
                let _ = writeln!(
                    out,
                    "MT certificate, chi1 = t^2, beta = 2, c0 = {}",
                    fmt_num(sk.c0)
                );
                table(&rep, &mut out);
                rep
            }
            "inclusion" => {
                let ctx = ModelContext::unit(2, 17)?;
                let sk = skoda_surrogate(&ctx, 200, seed)?;
                let u = bump_2d(&ctx)?;
                let rep = inclusion_check(&ctx, &u, ctx.reference_potential(), &sk, "bump")?;
                let _ = writeln!(
                    out,
                    "entropy bound on E_2, c = c0/2 = {}",
                    fmt_num(0.5 * sk.c0)
                );
                table(&rep, &mut out);
                rep
            }
            "weight-construct" => {
                let ctx = ModelContext::unit(1, 201)?;
                let spec = CorpusSpec {
                    count: 1,
                    ..Default::default()
                };
                let it = fuzz_corpus(&ctx, &spec, seed)?.remove(0);
                let mu = ma_measure(&ctx, &it.u)?;
                let tail = synthetic_tail(&it.u, &it.phi, &mu)?;
                let (rep, c) = weight_construct_certificate(&tail, &it.phi, &mu, &it.label)?;
                let _ = writeln!(out, "{:>4}  {:>14}  {:>14}", "k", "t_k", "chi(t_k)");
                for (k, t) in c.breakpoints.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{:>4}  {:>14}  {:>14}",
                        k + 1,
                        fmt_num(*t),
                        fmt_num(c.weight.eval(*t))
                    );
                }
                let basel: f64 = (1..=c.k_count()).map(|k| 1.0 / (k * k) as f64).sum();
                let _ = writeln!(
                    out,
                    "integral = {}  <=  chi(1) + sum k^-2 = {} + {} = {}  ({})",
                    fmt_num(c.integral),
                    fmt_num(c.weight.eval(1.0)),
                    fmt_num(basel),
                    fmt_num(c.bound),
                    if c.integral <= c.bound + 1e-6 {
                        "PASS"
                    } else {
                        "FAIL"
                    }
                );
                rep
            }
            "perturb" => {
                let ctx = ModelContext::unit(2, 17)?;
                let u = bump_2d(&ctx)?;
                let rep = perturbation_scan(
                    &ctx,
                    &u,
                    &[0.0, 0.25, 1.0, 4.0],
                    0.25,
                    Nodewise::Assert,
                    "bump",
                )?;
                let _ = writeln!(out, "perturbation by t r, eps = 0.25");
                table(&rep, &mut out);
                rep
            }
            _ => unreachable!(),
        };
        Ok((rep, out))
    };
    NAMES.contains(&name).then(run)
}
