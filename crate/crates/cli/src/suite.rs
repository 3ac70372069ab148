//! Turns a config into an ordered task list and runs it.

use rand::Rng;
use torapot::functionals::{construct_weight, energy_p, entropy};
use torapot::grid::gaps;
use torapot::harness::corpus::{fuzz_corpus, rng, CorpusSpec};
use torapot::harness::demo::{synthetic_tail, weight_construct_certificate};
use torapot::harness::explore::{explore_stability, EXPLORATORY};
use torapot::harness::families::{bump_grid, random_bumps, separable, Bump};
use torapot::harness::inclusion::budget_monotonicity;
use torapot::harness::invariants::{
    energy_monotone, envelope_oracle, locality_check, ma_exactness_1d, ma_total_mass,
    strictly_convex,
};
use torapot::harness::{
    atomic_entropy_demo, inclusion_check, mass_profile_bound, mt_certificate, perturbation_scan,
    skoda_surrogate, stability_scan, subentropy::random_triple, subentropy_check,
    CertificateReport, Digest, Nodewise, SkodaSurrogate,
};
use torapot::monge_ampere::ma_measure;
use torapot::{ModelContext, Result as CoreResult, ScalarField, Weight};

use crate::config::{CertSpec, Config, ContextSpec, FamilySpec, WeightChoice};
use crate::pool::run_indexed;

/// Seed of a sub-stream: `seed` mixed with a tag and an index.
pub fn sub_seed(seed: u64, tag: u64, k: u64) -> u64 {
    let mut z =
        seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ k.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A potential of the suite, with its bump parameters when it has any.
#[derive(Debug, Clone)]
pub struct Member {
    pub label: String,
    pub u: ScalarField,
    pub phi: ScalarField,
    pub bumps: Option<Vec<Bump>>,
    /// Entropy of `u`, `+inf` for atomic measures.
    pub entropy: f64,
}

/// Everything shared by the tasks of one context.
pub struct Prepared {
    pub spec: ContextSpec,
    pub ctx: ModelContext,
    pub tag: String,
    pub members: Vec<Member>,
    pub skoda: Option<SkodaSurrogate>,
    pub seed: u64,
}

fn members(ctx: &ModelContext, families: &[FamilySpec], seed: u64) -> CoreResult<Vec<Member>> {
    let mut out = Vec::new();
    let r = ctx.reference_potential();
    for (f, fam) in families.iter().enumerate() {
        let s = sub_seed(seed, 1, f as u64);
        let bump_members = |list: Vec<Vec<Bump>>, out: &mut Vec<Member>| -> CoreResult<()> {
            for (k, b) in list.into_iter().enumerate() {
                let u = separable(ctx, &b)?;
                out.push(Member {
                    label: format!("f{f}-bump{k}"),
                    entropy: entropy(ctx, &u)?.to_f64(),
                    u,
                    phi: r.clone(),
                    bumps: Some(b),
                });
            }
            Ok(())
        };
        match fam {
            FamilySpec::Fuzz {
                count,
                max_pieces,
                smoothing,
                masked_every,
            } => {
                let spec = CorpusSpec {
                    count: *count,
                    max_pieces: *max_pieces,
                    smoothing: smoothing.clone(),
                    masked_every: *masked_every,
                };
                for it in fuzz_corpus(ctx, &spec, s)? {
                    out.push(Member {
                        label: format!("f{f}-{}", it.label),
                        entropy: entropy(ctx, &it.u)?.to_f64(),
                        u: it.u,
                        phi: it.phi,
                        bumps: None,
                    });
                }
            }
            FamilySpec::Bumps { kappas, widths } => {
                bump_members(bump_grid(ctx.dim(), kappas, widths), &mut out)?
            }
            FamilySpec::RandomBumps { count } => {
                bump_members(random_bumps(ctx, *count, s), &mut out)?
            }
        }
    }
    Ok(out)
}

fn needs_skoda(certs: &[CertSpec]) -> bool {
    certs.iter().any(|c| {
        matches!(
            c,
            CertSpec::Mt { .. } | CertSpec::MassProfile { .. } | CertSpec::Inclusion { .. }
        )
    })
}

pub fn prepare(cfg: &Config, seed: u64, jobs: usize) -> CoreResult<Vec<Prepared>> {
    let specs = cfg.context.list();
    let built = run_indexed(jobs, specs.len(), |c| -> CoreResult<Prepared> {
        let spec = specs[c].clone();
        let ctx = spec
            .build()
            .map_err(|e| torapot::Error::Invalid(e.to_string()))?;
        let cseed = sub_seed(seed, 0, c as u64);
        let skoda = if needs_skoda(&cfg.certificates) {
            Some(skoda_surrogate(
                &ctx,
                cfg.skoda_probes,
                sub_seed(cseed, 2, 0),
            )?)
        } else {
            None
        };
        Ok(Prepared {
            tag: format!("c{c}-d{}-r{}", spec.dim, spec.resolution),
            members: members(&ctx, &cfg.families, cseed)?,
            spec,
            ctx,
            skoda,
            seed: cseed,
        })
    });
    built.into_iter().collect()
}

/// One unit of work: a certificate kind applied to one input.
#[derive(Debug, Clone)]
pub struct Task {
    pub context: usize,
    pub cert: usize,
    pub index: usize,
    pub extra: usize,
}

fn weight_for(choice: &WeightChoice, ctx: &ModelContext, m: &Member) -> CoreResult<Weight> {
    match choice {
        WeightChoice::Fixed(w) => Ok(w.clone()),
        WeightChoice::Constructed => {
            Ok(construct_weight(&m.u, &m.phi, &ma_measure(ctx, &m.u)?)?.weight)
        }
    }
}

fn finite_members(p: &Prepared) -> Vec<usize> {
    (0..p.members.len())
        .filter(|&i| p.members[i].entropy.is_finite())
        .collect()
}

fn is_symmetric_line(p: &Prepared) -> bool {
    let (a, b) = p.ctx.domain().bounds(0);
    p.ctx.dim() == 1 && (a + b).abs() <= 1e-12 * b.abs()
}

/// Enumerates tasks in a fixed order: contexts, then certificates, then
/// inputs.
pub fn tasks(cfg: &Config, prepared: &[Prepared]) -> Vec<Task> {
    let mut out = Vec::new();
    for (c, p) in prepared.iter().enumerate() {
        let dim = p.ctx.dim();
        let nm = p.members.len();
        let fin = finite_members(p).len();
        for (k, cert) in cfg.certificates.iter().enumerate() {
            let mut push = |index: usize, extra: usize| {
                out.push(Task {
                    context: c,
                    cert: k,
                    index,
                    extra,
                })
            };
            match cert {
                CertSpec::EnvelopeOracle { instances, .. } if dim == 1 => {
                    (0..*instances).for_each(|i| push(i, 0))
                }
                CertSpec::MaExactness { .. } if dim == 1 => (0..nm).for_each(|i| push(i, 0)),
                CertSpec::MaExactness { .. } => push(0, 0),
                CertSpec::Locality { triples } if nm > 0 => (0..*triples).for_each(|i| push(i, 0)),
                CertSpec::EnergyMonotone { weights, .. } => {
                    for i in 0..nm {
                        (0..weights.len()).for_each(|w| push(i, w));
                    }
                }
                CertSpec::WeightConstruct => (0..nm).for_each(|i| push(i, 0)),
                CertSpec::Mt { weights, betas } => {
                    for i in 0..nm {
                        (0..weights.len() * betas.len()).for_each(|w| push(i, w));
                    }
                }
                CertSpec::MassProfile { weights } => {
                    for i in 0..nm {
                        (0..weights.len()).for_each(|w| push(i, w));
                    }
                }
                CertSpec::Inclusion { .. } if dim == 2 => {
                    (0..fin).for_each(|i| push(i, 0));
                    push(usize::MAX, 0);
                }
                CertSpec::Inclusion { .. } => {
                    (0..nm)
                        .filter(|&i| p.members[i].bumps.is_some())
                        .for_each(|i| push(i, 0));
                }
                CertSpec::Perturbation { .. } => (0..fin).for_each(|i| push(i, 0)),
                CertSpec::Subentropy { triples } => (0..*triples).for_each(|i| push(i, 0)),
                CertSpec::NoEnt if is_symmetric_line(p) => push(0, 0),
                CertSpec::Explore { .. } if fin > 0 => push(0, 0),
                _ => {}
            }
        }
    }
    out
}

/// Random non-convex 1-D obstacle.
fn wiggle(ctx: &ModelContext, seed: u64) -> ScalarField {
    let mut g = rng(seed);
    let terms: Vec<(f64, f64, f64)> = (0..g.gen_range(1..=4))
        .map(|_| {
            (
                g.gen_range(-0.6..0.6),
                g.gen_range(1.0..12.0),
                g.gen_range(0.0..6.3),
            )
        })
        .collect();
    let q = g.gen_range(-0.5..1.0);
    ScalarField::from_fn(*ctx.domain(), |x| {
        q * x[0] * x[0]
            + terms
                .iter()
                .map(|(a, w, b)| a * (w * x[0] + b).sin())
                .sum::<f64>()
    })
}

fn failed(theorem: &str, label: &str, seed: u64, err: &torapot::Error) -> CertificateReport {
    let mut rep =
        CertificateReport::new(theorem, label, Digest::default().str(label).finish(), seed);
    rep.error("error", err);
    rep
}

fn cert_name(c: &CertSpec) -> &'static str {
    match c {
        CertSpec::EnvelopeOracle { .. } => "envelope_oracle",
        CertSpec::MaExactness { .. } => "ma_exactness",
        CertSpec::Locality { .. } => "plurifine_locality",
        CertSpec::EnergyMonotone { .. } => "energy_increases",
        CertSpec::WeightConstruct => "weight_construct",
        CertSpec::Mt { .. } => "mt",
        CertSpec::MassProfile { .. } => "mass_profile",
        CertSpec::Inclusion { .. } => "inclusion",
        CertSpec::Perturbation { .. } => "perturbation",
        CertSpec::Subentropy { .. } => "subentropy",
        CertSpec::NoEnt => "no_ent",
        CertSpec::Explore { .. } => EXPLORATORY,
    }
}

pub fn run_task(cfg: &Config, prepared: &[Prepared], t: &Task) -> CertificateReport {
    let p = &prepared[t.context];
    let cert = &cfg.certificates[t.cert];
    let seed = sub_seed(p.seed, 3 + t.cert as u64, t.index as u64);
    let label = format!("{}-{}", p.tag, t.index);
    let mut rep = match execute(cert, p, t, seed) {
        Ok(r) => r,
        Err(e) => failed(cert_name(cert), &label, seed, &e),
    };
    rep.label = format!("{}/{}", p.tag, rep.label);
    rep
}

fn execute(cert: &CertSpec, p: &Prepared, t: &Task, seed: u64) -> CoreResult<CertificateReport> {
    let ctx = &p.ctx;
    let member = p.members.get(t.index);
    let m = || member.ok_or_else(|| torapot::Error::Invalid("no such member".into()));
    match cert {
        CertSpec::EnvelopeOracle { tol, .. } => {
            envelope_oracle(ctx, &wiggle(ctx, seed), *tol, &format!("wiggle{}", t.index))
        }
        CertSpec::MaExactness { tol } => {
            if ctx.dim() == 1 {
                let m = m()?;
                ma_exactness_1d(ctx, &strictly_convex(ctx, &m.u)?, &m.label)
            } else {
                ma_total_mass(ctx, *tol)
            }
        }
        CertSpec::Locality { .. } => {
            let m = &p.members[t.index % p.members.len()];
            // j strictly between the extreme gaps, so {u > φ − j} is a
            // nonempty proper subset whenever the gap is not constant
            let g: Vec<f64> = gaps(&m.u, &m.phi)?
                .into_iter()
                .flatten()
                .filter(|g| g.is_finite())
                .collect();
            let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = g.iter().copied().fold(0.0, f64::max);
            let j = lo + (hi - lo) * rng(seed).gen_range(0.05..0.95);
            locality_check(ctx, &m.u, &m.phi, j, &m.label)
        }
        CertSpec::EnergyMonotone { weights, steps } => {
            let m = m()?;
            let w = &weights[t.extra];
            let mut rep =
                energy_monotone(ctx, &m.u, &m.phi, &weight_for(w, ctx, m)?, *steps, &m.label)?;
            rep.label = format!("{}[{}]", m.label, w.name());
            Ok(rep)
        }
        CertSpec::WeightConstruct => {
            let m = m()?;
            let mu = ma_measure(ctx, &m.u)?;
            let tail = synthetic_tail(&m.u, &m.phi, &mu)?;
            Ok(weight_construct_certificate(&tail, &m.phi, &mu, &m.label)?.0)
        }
        CertSpec::Mt { weights, betas } => {
            let m = m()?;
            let w = &weights[t.extra / betas.len()];
            let beta = betas[t.extra % betas.len()];
            let sk = p.skoda.as_ref().expect("fitted for mt");
            let label = format!("{}[{},b={beta}]", m.label, w.name());
            mt_certificate(ctx, &m.u, &m.phi, &weight_for(w, ctx, m)?, beta, sk, &label)
        }
        CertSpec::MassProfile { weights } => {
            let m = m()?;
            let w = &weights[t.extra];
            let sk = p.skoda.as_ref().expect("fitted for mass_profile");
            let label = format!("{}[{}]", m.label, w.name());
            mass_profile_bound(ctx, &m.u, &m.phi, &weight_for(w, ctx, m)?, sk, &label)
        }
        CertSpec::Inclusion {
            budget,
            resolutions,
        } => {
            if ctx.dim() == 1 {
                let m = m()?;
                let bumps = m.bumps.clone().expect("bump member");
                return stability_scan(
                    ctx,
                    resolutions,
                    0.05,
                    |c| Ok((separable(c, &bumps)?, c.reference_potential().clone())),
                    &m.label,
                );
            }
            let fin = finite_members(p);
            if t.index == usize::MAX {
                let mut ents = Vec::new();
                let mut ens = Vec::new();
                for &i in &fin {
                    let m = &p.members[i];
                    ents.push(m.entropy);
                    ens.push(energy_p(ctx, &m.u, &m.phi, 2.0)?.to_f64());
                }
                let mut budgets: Vec<f64> =
                    vec![0.25 * budget, 0.5 * budget, *budget, 2.0 * budget];
                budgets.dedup();
                return Ok(budget_monotonicity(&ents, &ens, &budgets, "budgets"));
            }
            let m = &p.members[fin[t.index]];
            let sk = p.skoda.as_ref().expect("fitted for inclusion");
            let mut rep = inclusion_check(ctx, &m.u, &m.phi, sk, &m.label)?;
            rep.constant("budget", *budget);
            rep.holds("within_budget", m.entropy <= *budget);
            Ok(rep)
        }
        CertSpec::Perturbation { ts, eps } => {
            let m = &p.members[finite_members(p)[t.index]];
            let nodewise = if ctx.dim() == 1 || m.bumps.is_some() {
                Nodewise::Assert
            } else {
                Nodewise::Report
            };
            perturbation_scan(ctx, &m.u, ts, *eps, nodewise, &m.label)
        }
        CertSpec::Subentropy { .. } => {
            let (a, b, c) = random_triple(*ctx.domain(), seed)?;
            subentropy_check(&a, &b, &c, seed, &format!("triple{}", t.index))
        }
        // the atom must outweigh 50 reference cells to register as singular
        CertSpec::NoEnt => {
            atomic_entropy_demo(&ctx.with_resolution(ctx.domain().resolution().max(201))?)
        }
        CertSpec::Explore { eps } => {
            let cands: Vec<(String, ScalarField)> = finite_members(p)
                .into_iter()
                .map(|i| (p.members[i].label.clone(), p.members[i].u.clone()))
                .collect();
            explore_stability(ctx, &cands, eps, "finite_entropy_members")
        }
    }
}

/// Reports of a full run, in task order.
pub fn run_suite(cfg: &Config, seed: u64, jobs: usize) -> CoreResult<Vec<CertificateReport>> {
    let prepared = prepare(cfg, seed, jobs)?;
    let list = tasks(cfg, &prepared);
    Ok(run_indexed(jobs, list.len(), |i| {
        run_task(cfg, &prepared, &list[i])
    }))
}

/// Whether a report counts towards the verdict.
pub fn is_verdict(rep: &CertificateReport) -> bool {
    rep.theorem != EXPLORATORY
}

pub fn all_pass(reports: &[CertificateReport]) -> bool {
    reports.iter().filter(|r| is_verdict(r)).all(|r| r.pass)
}
