use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weight `χ`: continuous, strictly increasing, `χ(0) = 0`.
///
/// Tables are piecewise linear through their samples and continue with the
/// last slope, so `χ(+inf) = +inf`. `RootIntegral` is `∫_0^t g(s)^{1/n} ds`
/// for a table `g`, integrated in closed form on every linear piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub enum Weight {
    Power {
        p: f64,
        scale: f64,
    },
    Table {
        ts: Vec<f64>,
        vals: Vec<f64>,
    },
    RootIntegral {
        ts: Vec<f64>,
        vals: Vec<f64>,
        n: usize,
        cum: Vec<f64>,
    },
}

/// JSON form `{kind: "power" | "table", p?, scale?, samples?, root?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
    /// Present when the weight is `∫ table^{1/root}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
}

impl TryFrom<WeightSpec> for Weight {
    type Error = Error;

    fn try_from(s: WeightSpec) -> Result<Self> {
        match s.kind.as_str() {
            "power" => {
                let p =
                    s.p.ok_or_else(|| Error::Invalid("power weight needs p".into()))?;
                Weight::power_scaled(p, s.scale.unwrap_or(1.0))
            }
            "table" => {
                let samples = s
                    .samples
                    .ok_or_else(|| Error::Invalid("table weight needs samples".into()))?;
                let table = Weight::table(samples.iter().map(|p| (p[0], p[1])).collect())?;
                match s.root {
                    None => Ok(table),
                    Some(n) => table.chi2(n),
                }
            }
            other => Err(Error::Invalid(format!("unknown weight kind {other:?}"))),
        }
    }
}

impl From<Weight> for WeightSpec {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Power { p, scale } => WeightSpec {
                kind: "power".into(),
                p: Some(p),
                scale: (scale != 1.0).then_some(scale),
                samples: None,
                root: None,
            },
            Weight::Table { ts, vals } => WeightSpec {
                kind: "table".into(),
                p: None,
                scale: None,
                samples: Some(ts.iter().zip(&vals).map(|(t, v)| [*t, *v]).collect()),
                root: None,
            },
            Weight::RootIntegral { ts, vals, n, .. } => WeightSpec {
                kind: "table".into(),
                p: None,
                scale: None,
                samples: Some(ts.iter().zip(&vals).map(|(t, v)| [*t, *v]).collect()),
                root: Some(n),
            },
        }
    }
}

/// `∫_0^d (v + b s)^{1/n} ds` for `v ≥ 0`, `b ≥ 0`.
fn root_piece(v: f64, b: f64, d: f64, n: usize) -> f64 {
    let e = 1.0 / n as f64;
    if d <= 0.0 {
        return 0.0;
    }
    if b * d <= 1e-6 * v {
        // second-order expansion avoids cancellation for flat pieces
        let r = b * d / v;
        return v.powf(e) * d * (1.0 + 0.5 * e * r + e * (e - 1.0) * r * r / 6.0);
    }
    let w = v + b * d;
    (w.powf(e + 1.0) - v.powf(e + 1.0)) / (b * (e + 1.0))
}

/// Index `k` of the table piece `[ts[k], ts[k+1])` holding `t`; the last
/// piece extends to infinity.
fn piece(ts: &[f64], t: f64) -> usize {
    match ts.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(k) => k.min(ts.len() - 2),
        Err(k) => k.saturating_sub(1).min(ts.len() - 2),
    }
}

fn table_eval(ts: &[f64], vals: &[f64], t: f64) -> f64 {
    let k = piece(ts, t);
    let slope = (vals[k + 1] - vals[k]) / (ts[k + 1] - ts[k]);
    vals[k] + slope * (t - ts[k])
}

impl Weight {
    /// `χ(t) = t^p`.
    pub fn power(p: f64) -> Result<Self> {
        Self::power_scaled(p, 1.0)
    }

    /// `χ(t) = scale · t^p`.
    pub fn power_scaled(p: f64, scale: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidPower(p));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Invalid(format!(
                "weight scale must be positive, got {scale}"
            )));
        }
        Ok(Weight::Power { p, scale })
    }

    /// Piecewise linear weight through `(t, χ(t))` samples starting at
    /// `(0, 0)`, strictly increasing in both coordinates.
    pub fn table(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 || samples[0] != (0.0, 0.0) {
            return Err(Error::InvalidWeightTable);
        }
        for w in samples.windows(2) {
            let ok = w[1].0.is_finite() && w[1].1.is_finite() && w[1].0 > w[0].0 && w[1].1 > w[0].1;
            if !ok {
                return Err(Error::InvalidWeightTable);
            }
        }
        let (ts, vals) = samples.into_iter().unzip();
        Ok(Weight::Table { ts, vals })
    }

    /// Exponent of a power weight.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            Weight::Power { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// `χ(t)` for `t ≥ 0` (negative arguments are clamped to 0).
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            Weight::Power { p, scale } => scale * t.powf(*p),
            Weight::Table { ts, vals } => table_eval(ts, vals, t),
            Weight::RootIntegral { ts, vals, n, cum } => {
                let k = piece(ts, t);
                let b = (vals[k + 1] - vals[k]) / (ts[k + 1] - ts[k]);
                cum[k] + root_piece(vals[k], b, t - ts[k], *n)
            }
        }
    }

    /// Right derivative `χ'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            Weight::Power { p, scale } => {
                if t == 0.0 {
                    match p.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => *scale,
                        _ => 0.0,
                    }
                } else {
                    scale * p * t.powf(p - 1.0)
                }
            }
            Weight::Table { ts, vals } => {
                let k = piece(ts, t);
                (vals[k + 1] - vals[k]) / (ts[k + 1] - ts[k])
            }
            Weight::RootIntegral { ts, vals, n, .. } => {
                table_eval(ts, vals, t).powf(1.0 / *n as f64)
            }
        }
    }

    /// `χ^{-1}(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> f64 {
        let y = y.max(0.0);
        match self {
            Weight::Power { p, scale } => (y / scale).powf(1.0 / p),
            Weight::Table { ts, vals } => {
                let k = piece(vals, y);
                let slope = (vals[k + 1] - vals[k]) / (ts[k + 1] - ts[k]);
                ts[k] + (y - vals[k]) / slope
            }
            Weight::RootIntegral { .. } => {
                let mut hi = 1.0;
                while self.eval(hi) < y {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.eval(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// `c · χ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Invalid(format!(
                "weight scale must be positive, got {c}"
            )));
        }
        Ok(match self {
            Weight::Power { p, scale } => Weight::Power {
                p: *p,
                scale: scale * c,
            },
            Weight::Table { ts, vals } => Weight::Table {
                ts: ts.clone(),
                vals: vals.iter().map(|v| v * c).collect(),
            },
            Weight::RootIntegral { .. } => {
                return Err(Error::Invalid("cannot rescale a derived weight".into()))
            }
        })
    }

    /// Rescaled so that `χ(1) = 1`.
    pub fn normalized_at_one(&self) -> Result<Self> {
        self.scaled(1.0 / self.eval(1.0))
    }

    /// `χ₂(t) = ∫_0^t χ(s)^{1/n} ds`.
    pub fn chi2(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(n));
        }
        match self {
            Weight::Power { p, scale } => {
                let q = 1.0 + p / n as f64;
                Weight::power_scaled(q, scale.powf(1.0 / n as f64) / q)
            }
            Weight::Table { ts, vals } => {
                let mut cum = vec![0.0; ts.len()];
                for k in 0..ts.len() - 1 {
                    let d = ts[k + 1] - ts[k];
                    let b = (vals[k + 1] - vals[k]) / d;
                    cum[k + 1] = cum[k] + root_piece(vals[k], b, d, n);
                }
                Ok(Weight::RootIntegral {
                    ts: ts.clone(),
                    vals: vals.clone(),
                    n,
                    cum,
                })
            }
            Weight::RootIntegral { .. } => Err(Error::Invalid(
                "root integral of a derived weight is not supported".into(),
            )),
        }
    }
}

/// `τ₂(1) = χ₂(s) / χ₂'(s)` with `s = γ₁(a^{-n})`, for `χ₁` and dimension `n`.
pub fn tau2_at_one(chi1: &Weight, n: usize, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::ParameterOutOfRange(a));
    }
    let chi2 = chi1.chi2(n)?;
    let s = chi1.inverse(a.powi(-(n as i32)));
    Ok(chi2.eval(s) / chi1.eval(s).powf(1.0 / n as f64))
}

/// Closed form of [`tau2_at_one`] for `χ₁ = t^p`: `a^{-n/p} / q`, `q = 1 + p/n`.
pub fn tau2_power(p: f64, n: usize, a: f64) -> f64 {
    let q = 1.0 + p / n as f64;
    a.powf(-(n as f64) / p) / q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> Weight {
        Weight::table(vec![
            (0.0, 0.0),
            (0.5, 0.1),
            (1.0, 1.0),
            (2.5, 1.7),
            (4.0, 9.0),
        ])
        .unwrap()
    }

    /// Composite Simpson on `[a, b]` with `m` panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for k in 1..m {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn power_examples() {
        assert_eq!(Weight::power(1.0).unwrap().eval(3.0), 3.0);
        assert!((Weight::power(2.0).unwrap().inverse(9.0) - 3.0).abs() < 1e-15);
        assert!(matches!(Weight::power(0.0), Err(Error::InvalidPower(_))));
        let chi = Weight::power(1.0).unwrap().chi2(1).unwrap();
        assert!((chi.eval(3.0) - 4.5).abs() < 1e-12);
    }

    #[test]
    fn power_chi2_closed_form() {
        for (p, n) in [(1.0, 1), (2.0, 2), (0.5, 2), (3.0, 1)] {
            let q = 1.0 + p / n as f64;
            let c = Weight::power(p).unwrap().chi2(n).unwrap();
            for t in [0.3, 1.0, 2.7] {
                assert!((c.eval(t) - t.powf(q) / q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_chi2_matches_quadrature() {
        let w = sample_table();
        for n in [1, 2] {
            let c = w.chi2(n).unwrap();
            for t in [0.25, 0.5, 0.9, 1.0, 3.3, 6.0] {
                // integrate piecewise so the kinks sit on panel boundaries
                let mut knots: Vec<f64> = vec![0.0, 0.5, 1.0, 2.5, 4.0]
                    .into_iter()
                    .filter(|k| *k < t)
                    .collect();
                knots.push(t);
                let g = |s: f64| w.eval(s).powf(1.0 / n as f64);
                // s = a + (b - a) w^2 smooths the root singularity at a zero
                let quad = |m: usize| -> f64 {
                    knots
                        .windows(2)
                        .map(|k| {
                            let len = k[1] - k[0];
                            simpson(|w| g(k[0] + len * w * w) * 2.0 * len * w, 0.0, 1.0, m)
                        })
                        .sum()
                };
                let (coarse, fine) = (quad(2000), quad(4000));
                let rich = fine + (fine - coarse) / 15.0;
                assert!((c.eval(t) - rich).abs() <= 1e-8 * rich.abs(), "n={n} t={t}");
                assert!((c.derivative(t) - g(t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverses_round_trip() {
        let ws = [
            Weight::power(1.7).unwrap(),
            sample_table(),
            sample_table().chi2(2).unwrap(),
            Weight::power(2.0).unwrap().chi2(2).unwrap(),
        ];
        for w in &ws {
            for y in [0.0, 0.01, 0.5, 1.0, 3.0, 40.0] {
                assert!(
                    (w.eval(w.inverse(y)) - y).abs() <= 1e-9 * (1.0 + y),
                    "{w:?} {y}"
                );
            }
        }
    }

    #[test]
    fn tau_closed_form() {
        for (p, n, a) in [(1.0, 1, 0.5), (2.0, 2, 0.3), (1.0, 2, 0.9), (0.5, 1, 0.7)] {
            let numeric = tau2_at_one(&Weight::power(p).unwrap(), n, a).unwrap();
            assert!((numeric - tau2_power(p, n, a)).abs() <= 1e-8 * numeric);
        }
        assert!((tau2_power(1.0, 1, 0.5) - 1.0).abs() < 1e-15);
        assert!(tau2_at_one(&Weight::power(1.0).unwrap(), 1, 1.5).is_err());
    }

    #[test]
    fn tabulated_power_agrees_with_symbolic() {
        let samples: Vec<(f64, f64)> = (0..=4000)
            .map(|k| {
                let t = k as f64 * 0.005;
                (t, t)
            })
            .collect();
        let tab = Weight::table(samples).unwrap();
        for (n, a) in [(1, 0.5), (2, 0.4)] {
            let x = tau2_at_one(&tab, n, a).unwrap();
            assert!((x - tau2_power(1.0, n, a)).abs() < 1e-8);
        }
    }

    #[test]
    fn json_forms() {
        let w: Weight = serde_json::from_str(r#"{"kind":"power","p":2}"#).unwrap();
        assert_eq!(w, Weight::power(2.0).unwrap());
        let t: Weight =
            serde_json::from_str(r#"{"kind":"table","samples":[[0,0],[1,2]]}"#).unwrap();
        assert_eq!(t.eval(3.0), 6.0);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Weight>(&s).unwrap(), t);
        assert!(
            serde_json::from_str::<Weight>(r#"{"kind":"table","samples":[[0,1],[1,2]]}"#).is_err()
        );
    }
}
