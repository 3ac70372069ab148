//! Acceptance suite: runs the bundled configuration through the binary and
//! checks every criterion against the written report. Prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use torapot_cli::config::Config;
use torapot_cli::suite::run_suite;

// pinned tolerances
const ENVELOPE_TOL: f64 = 1e-9;
const ENVELOPE_BUDGET: Duration = Duration::from_secs(5);
const MA_1D_TOL: f64 = 0.0;
const MA_2D_TOL: f64 = 1e-10;
const LOCALITY_REL: f64 = 1e-10;
const ENERGY_STEP_SLACK: f64 = -1e-10;
const ENERGY_LIMIT_REL: f64 = 1e-8;
const CONSTRUCT_TOL: f64 = 1e-6;
const TAU2_REL: f64 = 1e-8;
const MT_MIN_INSTANCES: usize = 60;
const INCLUSION_BUDGET: f64 = 5.0;
const STABILITY_VARIATION: f64 = 0.05;
const PERTURB_TOTAL_REL: f64 = 1e-9;
const PERTURB_NODE_REL: f64 = 1e-7;
const SUBENTROPY_TOL: f64 = 1e-12;
const SUBENTROPY_TRIPLES: usize = 100;
const VERIFY_BUDGET: Duration = Duration::from_secs(60);

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.json")
}

fn num(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "INF" => f64::INFINITY,
        Value::String(s) if s == "-INF" => f64::NEG_INFINITY,
        _ => f64::NAN,
    }
}

struct Rep<'a>(&'a Value);

impl<'a> Rep<'a> {
    fn theorem(&self) -> &str {
        self.0["theorem"].as_str().unwrap()
    }
    fn label(&self) -> &str {
        self.0["label"].as_str().unwrap()
    }
    fn pass(&self) -> bool {
        self.0["pass"].as_bool().unwrap()
    }
    fn dim(&self) -> usize {
        if self.label().contains("-d2-") {
            2
        } else {
            1
        }
    }
    fn assertions(&self) -> impl Iterator<Item = &'a Value> {
        self.0["assertions"].as_array().unwrap().iter()
    }
    fn assertion(&self, name: &str) -> Option<&'a Value> {
        self.assertions().find(|a| a["name"] == name)
    }
    fn prefixed(&self, prefix: &str) -> Vec<&'a Value> {
        self.assertions()
            .filter(|a| a["name"].as_str().unwrap().starts_with(prefix))
            .collect()
    }
    fn record(&self, list: &str, name: &str) -> Option<f64> {
        self.0[list]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["name"] == name)
            .map(|e| num(&e["value"]))
    }
}

/// Accumulates the findings of one criterion.
struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            ok: true,
            notes: Vec::new(),
        }
    }
    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            let note = format!("violated: {}", what.into());
            if !self.notes.contains(&note) {
                self.notes.push(note);
            }
        }
    }
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

/// A tolerance recorded by the harness equals the pinned value up to the
/// rounding of the product that formed it.
fn pinned(actual: f64, expected: f64) -> bool {
    (actual - expected).abs() <= 1e-12 * expected.abs()
}

fn slack(a: &Value) -> f64 {
    num(&a["slack"])
}
fn tol(a: &Value) -> f64 {
    num(&a["tolerance"])
}
fn lhs(a: &Value) -> f64 {
    num(&a["lhs"])
}

fn of<'a>(reports: &'a [Value], theorem: &str) -> Vec<Rep<'a>> {
    reports
        .iter()
        .map(Rep)
        .filter(|r| r.theorem() == theorem)
        .collect()
}

fn criterion_1(reports: &[Value], cfg: &Config) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "envelope_oracle");
    c.require(reps.len() >= 50, format!("{} instances < 50", reps.len()));
    c.require(
        reps.iter().all(|r| r.label().contains("-d1-r201")),
        "resolution 201",
    );
    let mut worst = 0.0f64;
    for r in &reps {
        let a = r.assertion("sup_error").unwrap();
        c.require(tol(a) == ENVELOPE_TOL, "pinned envelope tolerance");
        c.require(r.pass(), format!("{} passes", r.label()));
        worst = worst.max(lhs(a));
    }
    // timing: only the envelope instances, on the 1-D context
    let mut only = cfg.clone();
    only.context = torapot_cli::config::Contexts::One(cfg.context.list()[0].clone());
    only.families.clear();
    only.certificates
        .retain(|k| matches!(k, torapot_cli::config::CertSpec::EnvelopeOracle { .. }));
    let start = Instant::now();
    let again = run_suite(&only, cfg.seed, 1).unwrap();
    let took = start.elapsed();
    c.require(
        again.len() == 50 && again.iter().all(|r| r.pass),
        "timed rerun passes",
    );
    c.require(took < ENVELOPE_BUDGET, format!("runtime {took:.2?} < 5 s"));
    c.note(format!(
        "{} instances, max sup error {worst:e}, {took:.2?}",
        reps.len()
    ));
    c
}

fn criterion_2(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "ma_exactness");
    let (mut n1, mut n2) = (0, 0);
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        if let Some(a) = r.assertion("nodewise_error") {
            n1 += 1;
            c.require(
                tol(a) == MA_1D_TOL && lhs(a) == 0.0,
                "exact slope-jump agreement",
            );
        } else if let Some(a) = r.assertion("total_mass") {
            n2 += 1;
            c.require(tol(a) == MA_2D_TOL, "pinned 2-D mass tolerance");
            c.require(
                r.record("constants", "volume") == Some(4.0),
                "body volume 4",
            );
            let m = r.record("empirical", "total_mass").unwrap();
            c.require((m - 4.0).abs() <= MA_2D_TOL, format!("total mass {m}"));
        } else {
            c.require(false, format!("{} has no recognised assertion", r.label()));
        }
    }
    c.require(n1 > 0 && n2 > 0, "both dimensions covered");
    c.note(format!("{n1} exact 1-D measures, {n2} 2-D mass checks"));
    c
}

fn criterion_3(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "plurifine_locality");
    let mut fractions = Vec::new();
    for d in [1, 2] {
        let n = reps.iter().filter(|r| r.dim() == d).count();
        c.require(n >= 20, format!("dim {d}: {n} triples < 20"));
    }
    let mut worst = 0.0f64;
    for r in &reps {
        let a = r.assertion("mass_difference").unwrap();
        let mass = if r.dim() == 1 { 2.0 } else { 4.0 };
        c.require(
            pinned(tol(a), LOCALITY_REL * mass),
            "pinned relative mass tolerance",
        );
        c.require(r.pass(), format!("{} passes", r.label()));
        worst = worst.max(lhs(a) / mass);
        fractions.push(r.record("empirical", "star_interior_fraction").unwrap());
    }
    let covered = fractions.iter().filter(|f| **f > 0.0).count();
    c.require(
        covered * 2 > fractions.len(),
        "most triples have a nonempty star interior",
    );
    c.note(format!(
        "{} triples, max relative difference {worst:e}, {covered} with nonempty star interior",
        reps.len()
    ));
    c
}

fn criterion_4(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "energy_increases");
    let mut weights = BTreeSet::new();
    let mut worst = f64::INFINITY;
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        let e = r.record("empirical", "energy").unwrap();
        for a in r.prefixed("step_") {
            c.require(pinned(tol(a), 1e-10 * e.max(1.0)), "pinned step tolerance");
            c.require(
                slack(a) >= ENERGY_STEP_SLACK,
                format!("{} step slack {}", r.label(), slack(a)),
            );
            worst = worst.min(slack(a));
        }
        let lim = r.assertion("limit").unwrap();
        c.require(
            pinned(tol(lim), ENERGY_LIMIT_REL * e.max(1.0)),
            "pinned limit tolerance",
        );
        weights.insert(
            r.label()
                .rsplit('[')
                .next()
                .unwrap()
                .trim_end_matches(']')
                .to_string(),
        );
    }
    c.require(weights.len() == 3, format!("weights {weights:?}"));
    c.note(format!(
        "{} runs, weights {weights:?}, min step slack {worst:e}",
        reps.len()
    ));
    c
}

fn criterion_5(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "weight_construct");
    let mut ks = 0.0f64;
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        c.require(
            tol(r.assertion("integral_bound").unwrap()) == CONSTRUCT_TOL,
            "pinned integral tolerance",
        );
        c.require(
            r.assertion("starts_at_zero").is_some() && r.assertion("strictly_increasing").is_some(),
            "shape",
        );
        ks = ks.max(r.record("constants", "K").unwrap());
    }
    c.require(!reps.is_empty(), "constructor exercised");
    c.note(format!("{} synthetic tails, up to K = {ks}", reps.len()));
    c
}

fn criterion_6(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "mt");
    let mut weights = BTreeSet::new();
    let mut betas = BTreeSet::new();
    let mut dims = BTreeSet::new();
    let mut closed = 0;
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        let label = r.label();
        let inner = &label[label.rfind('[').unwrap() + 1..label.len() - 1];
        let (w, b) = inner.split_once(",b=").unwrap();
        weights.insert(w.to_string());
        betas.insert(b.to_string());
        dims.insert(r.dim());
        if let Some(a) = r.assertion("tau2_closed_form") {
            closed += 1;
            c.require(
                pinned(
                    tol(a),
                    TAU2_REL * r.record("constants", "tau2_at_one").unwrap(),
                ),
                "pinned closed-form tolerance",
            );
        } else {
            c.require(w == "constructed", "closed form checked for power weights");
        }
    }
    c.require(
        reps.len() >= MT_MIN_INSTANCES,
        format!("{} instances", reps.len()),
    );
    c.require(weights.len() == 3, format!("weights {weights:?}"));
    c.require(
        betas == ["1.5", "2", "4"].iter().map(|s| s.to_string()).collect(),
        format!("betas {betas:?}"),
    );
    c.require(dims.len() == 2, "both dimensions");
    c.note(format!(
        "{} certificates, {closed} closed-form checks",
        reps.len()
    ));
    c
}

fn criterion_7(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "inclusion");
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        c.require(
            r.record("constants", "budget") == Some(INCLUSION_BUDGET),
            "budget 5",
        );
        for name in ["young_plain", "young_normalized", "energy_bound"] {
            let a = r.assertion(name).unwrap();
            c.require(
                slack(a) >= 0.0,
                format!("{} {name} slack {}", r.label(), slack(a)),
            );
        }
        c.require(
            r.record("empirical", "energy_p")
                .is_some_and(f64::is_finite),
            "finite E_2",
        );
    }
    c.require(reps.len() >= 5, format!("{} dim-2 samples", reps.len()));
    let budget = of(reports, "inclusion_budget");
    c.require(
        !budget.is_empty() && budget.iter().all(|r| r.pass()),
        "budget monotonicity",
    );
    let scans = of(reports, "inclusion_1d");
    let mut worst = 0.0f64;
    for r in &scans {
        let a = r.assertion("relative_variation").unwrap();
        c.require(
            num(&a["rhs"]) == STABILITY_VARIATION && tol(a) == 0.0,
            "pinned variation",
        );
        c.require(r.pass(), format!("{} passes", r.label()));
        worst = worst.max(lhs(a));
    }
    c.require(!scans.is_empty(), "1-D stability scans present");
    c.note(format!(
        "{} dim-2 samples within B = 5, {} 1-D scans, max variation {worst:.4}",
        reps.len(),
        scans.len()
    ));
    c
}

fn criterion_8(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "perturbation");
    let mut asserted = 0;
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        let n = r.dim() as i32;
        for t in [0.0f64, 0.25, 1.0, 4.0] {
            let total = r.assertion(&format!("total_t={t}")).unwrap();
            let vol = (2.0 * (1.0 + t)).powi(n);
            c.require(
                pinned(tol(total), PERTURB_TOTAL_REL * vol),
                "pinned total tolerance",
            );
            if let Some(a) = r.assertion(&format!("nodewise_t={t}")) {
                asserted += 1;
                c.require(tol(a) == PERTURB_NODE_REL, "pinned node-wise tolerance");
            }
        }
        for a in r
            .prefixed("scaling_t=")
            .into_iter()
            .chain(r.prefixed("below_eps_t="))
        {
            c.require(
                slack(a) >= 0.0,
                format!("{} {} slack {}", r.label(), a["name"], slack(a)),
            );
        }
    }
    c.require(
        !reps.is_empty() && asserted > 0,
        "node-wise agreement exercised",
    );
    c.note(format!(
        "{} potentials, {asserted} node-wise checks",
        reps.len()
    ));
    c
}

fn criterion_9(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "subentropy");
    for d in [1, 2] {
        let n = reps.iter().filter(|r| r.dim() == d).count();
        c.require(n >= SUBENTROPY_TRIPLES, format!("dim {d}: {n} triples"));
    }
    let mut worst = f64::INFINITY;
    for r in &reps {
        c.require(r.pass(), format!("{} passes", r.label()));
        let a = r.assertion("sub_entropy").unwrap();
        c.require(tol(a) == SUBENTROPY_TOL, "pinned inequality tolerance");
        let b = r.assertion("relabel_invariance").unwrap();
        c.require(
            tol(b) == 0.0 && lhs(b) == 0.0,
            "exact relabeling invariance",
        );
        worst = worst.min(slack(a));
    }
    c.note(format!("{} triples, min slack {worst:e}", reps.len()));
    c
}

fn criterion_10(reports: &[Value]) -> Check {
    let mut c = Check::new();
    let reps = of(reports, "no_ent");
    c.require(!reps.is_empty(), "demo present");
    for r in &reps {
        c.require(r.pass(), "demo passes");
        c.require(
            r.record("empirical", "entropy") == Some(f64::INFINITY),
            "entropy +INF",
        );
        c.require(
            r.assertion("same_singularity_type")
                .is_some_and(|a| a["pass"] == true),
            "same type",
        );
        c.require(
            r.assertion("mollified_entropy_finite")
                .is_some_and(|a| a["pass"] == true),
            "mollified finite",
        );
        c.note(format!(
            "atom mass {}, mollified entropy {}",
            r.record("empirical", "atom_mass").unwrap(),
            r.record("empirical", "mollified_entropy").unwrap()
        ));
    }
    c
}

fn verify_run(out: &Path) -> (i32, Duration) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_torapot"))
        .arg("verify")
        .arg(config_path())
        .arg("--out")
        .arg(out)
        .env_remove("TORAPOT_OUT")
        .output()
        .unwrap()
        .status;
    (status.code().unwrap(), start.elapsed())
}

fn main() {
    let base = std::env::temp_dir().join(format!("torapot-acceptance-{}", std::process::id()));
    let (a, b) = (base.join("first"), base.join("second"));
    let (code_a, time_a) = verify_run(&a);
    let (code_b, time_b) = verify_run(&b);
    let text = std::fs::read_to_string(a.join("report.json")).unwrap();
    let reports: Vec<Value> = serde_json::from_str(&text).unwrap();
    let cfg = Config::load(&config_path()).unwrap();

    let mut c11 = Check::new();
    for f in ["report.json", "report.csv"] {
        c11.require(
            std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap(),
            format!("{f} bit-identical"),
        );
    }
    c11.require(
        code_a == 0 && code_b == 0,
        format!("exit codes {code_a}, {code_b}"),
    );
    c11.require(
        time_a < VERIFY_BUDGET && time_b < VERIFY_BUDGET,
        "runtime < 60 s",
    );
    c11.note(format!(
        "{} reports, runs took {time_a:.2?} and {time_b:.2?}",
        reports.len()
    ));

    let results = [
        ("envelope oracle", criterion_1(&reports, &cfg)),
        ("Monge-Ampere exactness", criterion_2(&reports)),
        ("plurifine locality", criterion_3(&reports)),
        ("energy increases under cutoffs", criterion_4(&reports)),
        ("weight constructor", criterion_5(&reports)),
        ("Moser-Trudinger certificate", criterion_6(&reports)),
        ("entropy to energy inclusion", criterion_7(&reports)),
        ("perturbation expansion", criterion_8(&reports)),
        ("sub-entropy inequality", criterion_9(&reports)),
        ("atomic measure demo", criterion_10(&reports)),
        ("determinism and runtime", c11),
    ];
    let mut failed = 0;
    for (k, (name, check)) in results.iter().enumerate() {
        println!(
            "{} {:>2} {name}: {}",
            if check.ok { "PASS" } else { "FAIL" },
            k + 1,
            check.notes.join("; ")
        );
        failed += usize::from(!check.ok);
    }
    let _ = std::fs::remove_dir_all(&base);
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
