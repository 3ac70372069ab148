//! Experiment configuration: one JSON file per run.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use torapot::{Error as CoreError, GradientBody, GridDomain, ModelContext, Weight};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    Dimension(usize),
    #[error("β must exceed 1 (beta must exceed 1, got {0})")]
    Beta(f64),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid context: {0}")]
    Context(#[from] CoreError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub dim: usize,
    /// Domain bounds per axis, `[-1, 1]` by default.
    #[serde(default)]
    pub bounds: Option<Vec<[f64; 2]>>,
    pub resolution: usize,
    /// Slope box per axis, `[-1, 1]` by default.
    #[serde(default)]
    pub gradient_body: Option<Vec<[f64; 2]>>,
}

impl ContextSpec {
    pub fn build(&self) -> Result<ModelContext, ConfigError> {
        if self.dim != 1 && self.dim != 2 {
            return Err(ConfigError::Dimension(self.dim));
        }
        let axes = |b: &Option<Vec<[f64; 2]>>| -> Vec<(f64, f64)> {
            match b {
                Some(v) => v.iter().map(|p| (p[0], p[1])).collect(),
                None => vec![(-1.0, 1.0); self.dim],
            }
        };
        let domain = GridDomain::new(self.dim, &axes(&self.bounds), self.resolution)?;
        let body = GradientBody::new(self.dim, &axes(&self.gradient_body))?;
        Ok(ModelContext::new(domain, body)?)
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        ContextSpec {
            resolution,
            ..self.clone()
        }
    }
}

/// A single context or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Contexts {
    One(ContextSpec),
    Many(Vec<ContextSpec>),
}

impl Contexts {
    pub fn list(&self) -> Vec<ContextSpec> {
        match self {
            Contexts::One(c) => vec![c.clone()],
            Contexts::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Smoothed maxima of random affine functions.
    Fuzz {
        #[serde(default = "ten")]
        count: usize,
        #[serde(default = "twelve")]
        max_pieces: usize,
        #[serde(default = "default_smoothing")]
        smoothing: Vec<f64>,
        #[serde(default = "three")]
        masked_every: usize,
    },
    /// Separable bumps on a parameter grid (finite entropy).
    Bumps { kappas: Vec<f64>, widths: Vec<f64> },
    /// Seeded separable bumps (finite entropy).
    RandomBumps {
        #[serde(default = "ten")]
        count: usize,
    },
}

/// A weight: a power or table weight, or the one built from the data.
#[derive(Debug, Clone)]
pub enum WeightChoice {
    Fixed(Weight),
    Constructed,
}

impl WeightChoice {
    pub fn name(&self) -> String {
        match self {
            WeightChoice::Fixed(Weight::Power { p, scale }) if *scale == 1.0 => format!("t^{p}"),
            WeightChoice::Fixed(Weight::Power { p, scale }) => format!("{scale}t^{p}"),
            WeightChoice::Fixed(_) => "table".into(),
            WeightChoice::Constructed => "constructed".into(),
        }
    }
}

impl<'de> Deserialize<'de> for WeightChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        if v.get("kind").and_then(Value::as_str) == Some("constructed") {
            return Ok(WeightChoice::Constructed);
        }
        Weight::deserialize(v)
            .map(WeightChoice::Fixed)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertSpec {
    /// p_envelope against brute force on random 1-D obstacles.
    EnvelopeOracle {
        #[serde(default = "fifty")]
        instances: usize,
        #[serde(default = "envelope_tol")]
        tol: f64,
    },
    /// Slope-jump oracle in 1-D, total mass of `½|x|²` in 2-D.
    MaExactness {
        #[serde(default = "mass_tol")]
        tol: f64,
    },
    Locality {
        #[serde(default = "twenty")]
        triples: usize,
    },
    EnergyMonotone {
        weights: Vec<WeightChoice>,
        #[serde(default = "sixteen")]
        steps: usize,
    },
    WeightConstruct,
    Mt {
        weights: Vec<WeightChoice>,
        betas: Vec<f64>,
    },
    MassProfile {
        weights: Vec<WeightChoice>,
    },
    Inclusion {
        #[serde(default = "five")]
        budget: f64,
        #[serde(default = "default_scan")]
        resolutions: Vec<usize>,
    },
    Perturbation {
        #[serde(default = "default_ts")]
        ts: Vec<f64>,
        #[serde(default = "quarter")]
        eps: f64,
    },
    Subentropy {
        #[serde(default = "hundred")]
        triples: usize,
    },
    NoEnt,
    /// Ranking only; never pass or fail.
    Explore {
        #[serde(default = "default_explore_eps")]
        eps: Vec<f64>,
    },
}

/// Axes of `sweep`. Missing axes take a single default value.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub resolution: Vec<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub t: Vec<f64>,
    /// Bump parameters of the swept potential, one per axis.
    #[serde(default = "default_sweep_bump")]
    pub bump: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub context: Contexts,
    #[serde(default)]
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub certificates: Vec<CertSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    /// Probe count of the fitted integrability constants.
    #[serde(default = "default_probes")]
    pub skoda_probes: usize,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        // dimension errors first, so that a dim-3 context reports as such
        // even when the rest of the file is valid for another dimension
        let raw: Value = serde_json::from_str(text)?;
        let ctxs = match raw.get("context") {
            Some(Value::Array(a)) => a.clone(),
            Some(v) => vec![v.clone()],
            None => Vec::new(),
        };
        for c in ctxs {
            if let Some(d) = c.get("dim").and_then(Value::as_u64) {
                if d != 1 && d != 2 {
                    return Err(ConfigError::Dimension(d as usize));
                }
            }
        }
        let cfg: Config = serde_json::from_value(raw)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let ctxs = self.context.list();
        if ctxs.is_empty() {
            return Err(ConfigError::Invalid("no context".into()));
        }
        for c in &ctxs {
            c.build()?;
        }
        let betas: Vec<f64> = self
            .certificates
            .iter()
            .flat_map(|c| match c {
                CertSpec::Mt { betas, .. } => betas.clone(),
                _ => Vec::new(),
            })
            .chain(self.sweep.iter().flat_map(|s| s.beta.clone()))
            .collect();
        if let Some(b) = betas.iter().find(|b| !(**b > 1.0)) {
            return Err(ConfigError::Beta(*b));
        }
        for c in &self.certificates {
            match c {
                CertSpec::Perturbation { ts, eps } => {
                    if ts.iter().any(|t| !(*t >= 0.0)) || !(*eps > 0.0) {
                        return Err(ConfigError::Invalid(
                            "perturbation needs t ≥ 0 and eps > 0".into(),
                        ));
                    }
                }
                CertSpec::Explore { eps } if eps.iter().any(|e| !(*e > 0.0)) => {
                    return Err(ConfigError::Invalid("explore needs eps > 0".into()));
                }
                _ => {}
            }
        }
        if let Some(s) = &self.sweep {
            if s.p.iter().any(|p| !(*p > 0.0)) || s.t.iter().any(|t| !(*t >= 0.0)) {
                return Err(ConfigError::Invalid("sweep needs p > 0 and t ≥ 0".into()));
            }
            for r in &s.resolution {
                ctxs[0].with_resolution(*r).build()?;
            }
        }
        Ok(())
    }
}

fn three() -> usize {
    3
}
fn ten() -> usize {
    10
}
fn twelve() -> usize {
    12
}
fn sixteen() -> usize {
    16
}
fn twenty() -> usize {
    20
}
fn fifty() -> usize {
    50
}
fn hundred() -> usize {
    100
}
fn five() -> f64 {
    5.0
}
fn quarter() -> f64 {
    0.25
}
fn envelope_tol() -> f64 {
    1e-9
}
fn mass_tol() -> f64 {
    1e-10
}
fn default_probes() -> usize {
    200
}
fn default_smoothing() -> Vec<f64> {
    vec![0.0, 0.05, 0.2]
}
fn default_scan() -> Vec<usize> {
    vec![101, 201, 401]
}
fn default_ts() -> Vec<f64> {
    vec![0.0, 0.25, 1.0, 4.0]
}
fn default_explore_eps() -> Vec<f64> {
    vec![0.001, 0.01, 0.1]
}
fn default_sweep_bump() -> [f64; 2] {
    [0.5, 0.3]
}
