//! Certificate reports: one record per checked inequality.

use std::time::Duration;

use serde::{Serialize, Serializer};

/// Serializes non-finite numbers as the `INF` / `-INF` tokens (NaN as
/// `NAN`, which a passing report never contains).
pub fn ser_num<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_num(*v))
    }
}

/// Text form used by the CSV writer: shortest round-trip decimal or a token.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NAN".into()
    } else if v == f64::INFINITY {
        "INF".into()
    } else if v == f64::NEG_INFINITY {
        "-INF".into()
    } else {
        format!("{v:e}")
    }
}

/// One checked claim `lhs ≤ rhs`. Equalities are recorded as
/// `|a − b| ≤ 0` with a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    #[serde(serialize_with = "ser_num")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_num")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_num")]
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A measured quantity that is reported but never asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Empirical {
    pub name: String,
    #[serde(serialize_with = "ser_num")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub theorem: String,
    pub label: String,
    pub inputs_digest: String,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    pub empirical: Vec<Empirical>,
    pub constants: Vec<Empirical>,
    pub pass: bool,
    /// Excluded from serialization so that reports are byte-identical
    /// across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CertificateReport {
    pub fn new(theorem: &str, label: &str, digest: u64, seed: u64) -> Self {
        CertificateReport {
            theorem: theorem.into(),
            label: label.into(),
            inputs_digest: format!("{digest:016x}"),
            seed,
            assertions: Vec::new(),
            empirical: Vec::new(),
            constants: Vec::new(),
            pass: true,
            wall_time: Duration::ZERO,
        }
    }

    /// Records `lhs ≤ rhs` up to `tol`. Non-finite or NaN slack fails unless
    /// both sides are the same infinity.
    pub fn le(&mut self, name: &str, lhs: f64, rhs: f64, tol: f64) -> bool {
        let slack = if lhs == rhs { 0.0 } else { rhs - lhs };
        let pass = slack >= -tol;
        self.assertions.push(Assertion {
            name: name.into(),
            lhs,
            rhs,
            slack,
            tolerance: tol,
            pass,
        });
        self.pass &= pass;
        pass
    }

    /// Records `a = b` up to `tol` as `|a − b| ≤ 0`.
    pub fn close(&mut self, name: &str, a: f64, b: f64, tol: f64) -> bool {
        let d = if a == b { 0.0 } else { (a - b).abs() };
        self.le(name, d, 0.0, tol)
    }

    /// Records a boolean claim as `0 ≤ 0` or `1 ≤ 0`.
    pub fn holds(&mut self, name: &str, ok: bool) -> bool {
        self.le(name, if ok { 0.0 } else { 1.0 }, 0.0, 0.0)
    }

    pub fn empirical(&mut self, name: &str, value: f64) {
        self.empirical.push(Empirical {
            name: name.into(),
            value,
        });
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.push(Empirical {
            name: name.into(),
            value,
        });
    }

    /// Records a failed computation as a failing assertion, so that nothing
    /// is skipped silently.
    pub fn error(&mut self, name: &str, err: &crate::Error) {
        self.assertions.push(Assertion {
            name: format!("{name}: {err}"),
            lhs: f64::INFINITY,
            rhs: 0.0,
            slack: f64::NEG_INFINITY,
            tolerance: 0.0,
            pass: false,
        });
        self.pass = false;
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    /// Minimum slack over all assertions (`inf` if there are none).
    pub fn min_slack(&self) -> f64 {
        self.assertions
            .iter()
            .map(|a| a.slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.empirical
            .iter()
            .chain(&self.constants)
            .find(|e| e.name == name)
            .map(|e| e.value)
    }
}

/// FNV-1a, 64 bit, over the bit patterns of the inputs.
#[derive(Debug, Clone, Copy)]
pub struct Digest(u64);

impl Default for Digest {
    fn default() -> Self {
        Digest(0xcbf2_9ce4_8422_2325)
    }
}

impl Digest {
    pub fn bytes(mut self, bytes: &[u8]) -> Self {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
        self
    }

    pub fn f64(self, v: f64) -> Self {
        self.bytes(&v.to_bits().to_le_bytes())
    }

    pub fn floats(self, vs: &[f64]) -> Self {
        vs.iter().fold(self, |d, v| d.f64(*v))
    }

    pub fn str(self, s: &str) -> Self {
        self.bytes(s.as_bytes())
    }

    pub fn field(self, u: &crate::ScalarField) -> Self {
        let mask: Vec<u8> = u.mask().iter().map(|m| *m as u8).collect();
        self.floats(u.values()).bytes(&mask)
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}
