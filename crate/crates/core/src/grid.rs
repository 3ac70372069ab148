//! Grid domains, scalar fields and node-weighted measures.
//!
//! A [`GridDomain`] is a uniform tensor lattice on a box in one or two
//! dimensions. Potentials are [`ScalarField`]s: one value per node plus a
//! singular mask marking nodes where the potential is `-inf`. Measures are
//! [`DiscreteMeasure`]s carrying one weight per node. Masked nodes never carry
//! mass, which is the grid version of "does not charge pluripolar sets".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform node lattice on a box of dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    res: [usize; 2],
    spacing: [f64; 2],
}

impl GridDomain {
    /// Builds a domain with `resolution` nodes per axis.
    pub fn new(dim: usize, bounds: &[(f64, f64)], resolution: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if resolution < 3 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        if bounds.len() != dim {
            return Err(Error::BoundsArity {
                expected: dim,
                got: bounds.len(),
            });
        }
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        let mut res = [1usize; 2];
        let mut spacing = [1.0; 2];
        for (axis, &(a, b)) in bounds.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::DegenerateBounds { axis, lo: a, hi: b });
            }
            lo[axis] = a;
            hi[axis] = b;
            res[axis] = resolution;
            spacing[axis] = (b - a) / (resolution - 1) as f64;
        }
        Ok(Self {
            dim,
            lo,
            hi,
            res,
            spacing,
        })
    }

    /// `[-1, 1]^dim` with `resolution` nodes per axis.
    pub fn symmetric(dim: usize, resolution: usize) -> Result<Self> {
        Self::new(dim, &vec![(-1.0, 1.0); dim.min(3)], resolution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis.
    pub fn resolution(&self) -> usize {
        self.res[0]
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        self.res[axis]
    }

    pub fn len(&self) -> usize {
        self.res[0] * self.res[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        (self.lo[axis], self.hi[axis])
    }

    /// Product of the per-axis spacings.
    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        (0..self.dim)
            .map(|a| (self.hi[a] - self.lo[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn axis_coord(&self, axis: usize, k: usize) -> f64 {
        if k + 1 == self.res[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + k as f64 * self.spacing[axis]
        }
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix + self.res[0] * iy
    }

    pub fn multi_index(&self, i: usize) -> (usize, usize) {
        (i % self.res[0], i / self.res[0])
    }

    /// Coordinates of node `i`; the second entry is 0 in dimension 1.
    pub fn coords(&self, i: usize) -> [f64; 2] {
        let (ix, iy) = self.multi_index(i);
        if self.dim == 1 {
            [self.axis_coord(0, ix), 0.0]
        } else {
            [self.axis_coord(0, ix), self.axis_coord(1, iy)]
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        let (ix, iy) = self.multi_index(i);
        let edge = |k: usize, n: usize| k == 0 || k + 1 == n;
        edge(ix, self.res[0]) || (self.dim == 2 && edge(iy, self.res[1]))
    }

    /// Same lattice with `resolution` nodes per axis.
    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        let bounds: Vec<(f64, f64)> = (0..self.dim).map(|a| (self.lo[a], self.hi[a])).collect();
        Self::new(self.dim, &bounds, resolution)
    }
}

/// A potential sampled on the grid. Masked nodes hold `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: GridDomain,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarField {
    /// Wraps node values; `-inf` entries become masked nodes.
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DomainMismatch);
        }
        let mut mask = vec![false; values.len()];
        for (i, v) in values.iter().enumerate() {
            if *v == f64::NEG_INFINITY {
                mask[i] = true;
            } else if !v.is_finite() {
                return Err(Error::Invalid(format!("value {v} at node {i}")));
            }
        }
        Ok(Self {
            domain,
            values,
            mask,
        })
    }

    pub fn from_fn(domain: GridDomain, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..domain.len()).map(|i| f(domain.coords(i))).collect();
        Self::new(domain, values).expect("field closure returned +inf or NaN")
    }

    pub fn constant(domain: GridDomain, c: f64) -> Self {
        Self::from_fn(domain, |_| c)
    }

    /// Masks the given nodes (their values become `-inf`).
    pub fn with_mask(mut self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.values.len() {
            return Err(Error::DomainMismatch);
        }
        for (i, &m) in mask.iter().enumerate() {
            if m {
                self.mask[i] = true;
                self.values[i] = f64::NEG_INFINITY;
            }
        }
        Ok(self)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn has_mask(&self) -> bool {
        self.mask.iter().any(|&m| m)
    }

    pub fn unmasked(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(move |&i| !self.mask[i])
    }

    /// Maximum over unmasked nodes (`-inf` if all are masked).
    pub fn sup(&self) -> f64 {
        self.unmasked()
            .map(|i| self.values[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximum absolute value over unmasked nodes.
    pub fn sup_abs(&self) -> f64 {
        self.unmasked()
            .map(|i| self.values[i].abs())
            .fold(0.0, f64::max)
    }

    pub fn shift(&self, c: f64) -> Self {
        let values = self.values.iter().map(|v| v + c).collect();
        Self {
            domain: self.domain,
            values,
            mask: self.mask.clone(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        assert!(c >= 0.0, "scaling a potential by a negative factor");
        let values = self
            .values
            .iter()
            .zip(&self.mask)
            .map(|(v, &m)| if m { *v } else { v * c })
            .collect();
        Self {
            domain: self.domain,
            values,
            mask: self.mask.clone(),
        }
    }

    /// Node-wise sum; masked wherever either summand is masked.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Node-wise minimum.
    pub fn pointwise_min(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    /// Applies `f` on unmasked nodes, keeping the mask.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(&self.mask)
            .map(|(&v, &m)| if m { v } else { f(v) })
            .collect();
        Self::new(self.domain, values).expect("map produced +inf or NaN")
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_domains(&self.domain, &other.domain)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    f(a, b)
                }
            })
            .collect();
        Self::new(self.domain, values)
    }
}

pub(crate) fn check_domains(a: &GridDomain, b: &GridDomain) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DomainMismatch)
    }
}

/// Node-weighted measure with bookkeeping for mass that has no density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    domain: GridDomain,
    weights: Vec<f64>,
    singular_mass: f64,
    /// Density with respect to the context's reference density, when known.
    density: Option<Vec<f64>>,
}

impl DiscreteMeasure {
    pub fn new(domain: GridDomain, weights: Vec<f64>) -> Result<Self> {
        Self::with_singular(domain, weights, 0.0)
    }

    pub fn with_singular(
        domain: GridDomain,
        weights: Vec<f64>,
        singular_mass: f64,
    ) -> Result<Self> {
        if weights.len() != domain.len() {
            return Err(Error::DomainMismatch);
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Invalid(format!(
                "measure weight {} at node {i} is not a finite non-negative number",
                weights[i]
            )));
        }
        if !(singular_mass.is_finite() && singular_mass >= 0.0) {
            return Err(Error::Invalid(format!("singular mass {singular_mass}")));
        }
        Ok(Self {
            domain,
            weights,
            singular_mass,
            density: None,
        })
    }

    /// Measure `density * reference`.
    pub fn from_density(reference: &DiscreteMeasure, density: Vec<f64>) -> Result<Self> {
        if density.len() != reference.weights.len() {
            return Err(Error::DomainMismatch);
        }
        let weights = density
            .iter()
            .zip(&reference.weights)
            .map(|(f, w)| f * w)
            .collect();
        let mut m = Self::new(reference.domain, weights)?;
        m.density = Some(density);
        Ok(m)
    }

    /// Equal weights summing to one.
    pub fn uniform(domain: GridDomain) -> Self {
        let w = 1.0 / domain.len() as f64;
        Self::new(domain, vec![w; domain.len()]).expect("uniform weights are valid")
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn singular_mass(&self) -> f64 {
        self.singular_mass
    }

    pub fn density(&self) -> Option<&[f64]> {
        self.density.as_deref()
    }

    pub(crate) fn set_density(&mut self, density: Vec<f64>) {
        self.density = Some(density);
    }

    /// Mass carried by node weights (no singular part).
    pub fn node_total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.node_total() + self.singular_mass
    }

    pub fn scaled(&self, c: f64) -> Self {
        assert!(c >= 0.0 && c.is_finite(), "invalid measure scale {c}");
        Self {
            domain: self.domain,
            weights: self.weights.iter().map(|w| w * c).collect(),
            singular_mass: self.singular_mass * c,
            density: self
                .density
                .as_ref()
                .map(|d| d.iter().map(|f| f * c).collect()),
        }
    }

    /// Rescaled to total mass one.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.total();
        if t <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(self.scaled(1.0 / t))
    }

    /// Mass of the nodes selected by `set`.
    pub fn mass_on(&self, set: &[bool]) -> f64 {
        self.weights
            .iter()
            .zip(set)
            .filter(|(_, &s)| s)
            .map(|(w, _)| w)
            .sum()
    }
}

/// `Σ_i g(x_i) μ_i`. Nodes without mass are skipped, so `g` may be `-inf` on
/// masked nodes.
pub fn integrate(g: &[f64], mu: &DiscreteMeasure) -> Result<f64> {
    if g.len() != mu.weights.len() {
        return Err(Error::DomainMismatch);
    }
    let mut acc = 0.0;
    for (i, (&gi, &w)) in g.iter().zip(&mu.weights).enumerate() {
        if w == 0.0 {
            continue;
        }
        if !gi.is_finite() {
            return Err(Error::InfiniteIntegrand(i));
        }
        acc += gi * w;
    }
    Ok(acc)
}

/// [`integrate`] plus `singular_value * singular_mass`.
pub fn integrate_with_singular(
    g: &[f64],
    mu: &DiscreteMeasure,
    singular_value: f64,
) -> Result<f64> {
    Ok(integrate(g, mu)? + singular_value * mu.singular_mass)
}

pub fn integrate_field(g: &ScalarField, mu: &DiscreteMeasure) -> Result<f64> {
    check_domains(g.domain(), mu.domain())?;
    integrate(g.values(), mu)
}

/// How [`superlevel_mass`] compares the gap `φ − u` with `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// `{u < φ − t}`
    Strict,
    /// `{φ − u ≥ t}`
    AtLeast,
}

/// `μ({u < φ − t})` or `μ({φ − u ≥ t})`. Nodes where `φ` is masked are
/// ignored; nodes masked only in `u` have an infinite gap.
pub fn superlevel_mass(
    u: &ScalarField,
    phi: &ScalarField,
    t: f64,
    mu: &DiscreteMeasure,
    level: Level,
) -> Result<f64> {
    check_domains(u.domain(), phi.domain())?;
    check_domains(u.domain(), mu.domain())?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeArgument(t));
    }
    let mut acc = 0.0;
    for i in 0..u.values.len() {
        if phi.mask[i] {
            continue;
        }
        let gap = if u.mask[i] {
            f64::INFINITY
        } else {
            phi.values[i] - u.values[i]
        };
        let hit = match level {
            Level::Strict => gap > t,
            Level::AtLeast => gap >= t,
        };
        if hit {
            acc += mu.weights[i];
        }
    }
    Ok(acc)
}

/// Node-wise maximum (masked only where both inputs are masked).
pub fn pointwise_max(u: &ScalarField, v: &ScalarField) -> Result<ScalarField> {
    check_domains(u.domain(), v.domain())?;
    let values = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a.max(*b))
        .collect();
    ScalarField::new(u.domain, values)
}

pub fn shift(u: &ScalarField, c: f64) -> ScalarField {
    u.shift(c)
}

/// `sup(u − φ)` over nodes where both are finite.
pub fn sup_rel(u: &ScalarField, phi: &ScalarField) -> Result<f64> {
    check_domains(u.domain(), phi.domain())?;
    let s = (0..u.values.len())
        .filter(|&i| !u.mask[i] && !phi.mask[i])
        .map(|i| u.values[i] - phi.values[i])
        .fold(f64::NEG_INFINITY, f64::max);
    if s == f64::NEG_INFINITY {
        Err(Error::AllMasked)
    } else {
        Ok(s)
    }
}

/// `φ − u` on nodes where `φ` is finite (`+inf` where only `u` is masked),
/// `None` where `φ` is masked.
pub fn gaps(u: &ScalarField, phi: &ScalarField) -> Result<Vec<Option<f64>>> {
    check_domains(u.domain(), phi.domain())?;
    Ok((0..u.values.len())
        .map(|i| {
            if phi.mask[i] {
                None
            } else if u.mask[i] {
                Some(f64::INFINITY)
            } else {
                Some(phi.values[i] - u.values[i])
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(res: usize) -> GridDomain {
        GridDomain::symmetric(1, res).unwrap()
    }

    #[test]
    fn build_domain_counts_and_volume() {
        let d = line(201);
        assert_eq!(d.len(), 201);
        assert!((d.cell_volume() - 0.01).abs() < 1e-15);
        let d2 = GridDomain::symmetric(2, 65).unwrap();
        assert_eq!(d2.len(), 65 * 65);
        assert!((d2.cell_volume() - (2.0f64 / 64.0).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn build_domain_rejects_bad_input() {
        let e = GridDomain::new(3, &[(-1.0, 1.0); 3], 5).unwrap_err();
        assert_eq!(e, Error::UnsupportedDimension(3));
        assert!(e.to_string().contains("unsupported dimension"));
        assert!(matches!(
            GridDomain::new(1, &[(1.0, 1.0)], 5),
            Err(Error::DegenerateBounds { .. })
        ));
        assert_eq!(
            GridDomain::new(1, &[(0.0, 1.0)], 2),
            Err(Error::ResolutionTooSmall(2))
        );
    }

    #[test]
    fn endpoints_are_exact() {
        let d = GridDomain::new(1, &[(-0.3, 0.7)], 11).unwrap();
        assert_eq!(d.coords(10)[0], 0.7);
        assert_eq!(d.coords(0)[0], -0.3);
    }

    #[test]
    fn integrate_basics() {
        let d = line(201);
        let mu = DiscreteMeasure::uniform(d);
        let one = vec![1.0; d.len()];
        assert!((integrate(&one, &mu).unwrap() - 1.0).abs() < 1e-12);
        let three = vec![3.0; d.len()];
        assert!((integrate(&three, &mu).unwrap() - 3.0 * mu.total()).abs() < 1e-12);
        let x: Vec<f64> = (0..d.len()).map(|i| d.coords(i)[0]).collect();
        assert!(integrate(&x, &mu).unwrap().abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_infinite_mass_node() {
        let d = line(5);
        let mu = DiscreteMeasure::uniform(d);
        let mut g = vec![0.0; 5];
        g[2] = f64::NEG_INFINITY;
        assert_eq!(integrate(&g, &mu), Err(Error::InfiniteIntegrand(2)));
        let mut w = vec![0.25; 5];
        w[2] = 0.0;
        let mu0 = DiscreteMeasure::new(d, w).unwrap();
        assert_eq!(integrate(&g, &mu0).unwrap(), 0.0);
    }

    #[test]
    fn singular_rule_is_opt_in() {
        let d = line(3);
        let mu = DiscreteMeasure::with_singular(d, vec![0.5, 0.0, 0.5], 2.0).unwrap();
        let g = vec![1.0; 3];
        assert_eq!(integrate(&g, &mu).unwrap(), 1.0);
        assert_eq!(integrate_with_singular(&g, &mu, 4.0).unwrap(), 9.0);
    }

    #[test]
    fn superlevel_examples() {
        let d = line(201);
        let mu = DiscreteMeasure::uniform(d);
        let phi = ScalarField::from_fn(d, |x| 0.5 * x[0] * x[0]);
        let u = phi.shift(-1.0);
        let m = superlevel_mass(&u, &phi, 0.5, &mu, Level::AtLeast).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        assert_eq!(
            superlevel_mass(&u, &phi, 2.0, &mu, Level::AtLeast).unwrap(),
            0.0
        );

        let v = ScalarField::from_fn(d, |x| 0.5 * x[0] * x[0] - x[0].abs());
        // 51 nodes on each side with |x| >= 0.5, 50 with |x| > 0.5.
        let at_least = superlevel_mass(&v, &phi, 0.5, &mu, Level::AtLeast).unwrap();
        assert!((at_least - 102.0 / 201.0).abs() < 1e-12);
        let strict = superlevel_mass(&v, &phi, 0.5, &mu, Level::Strict).unwrap();
        assert!((strict - 100.0 / 201.0).abs() < 1e-12);
    }

    #[test]
    fn masked_gap_is_infinite() {
        let d = line(5);
        let mu = DiscreteMeasure::uniform(d);
        let phi = ScalarField::constant(d, 0.0);
        let mut mask = vec![false; 5];
        mask[1] = true;
        let u = ScalarField::constant(d, -0.1).with_mask(&mask).unwrap();
        let m = superlevel_mass(&u, &phi, 10.0, &mu, Level::Strict).unwrap();
        assert!((m - 0.2).abs() < 1e-15);
    }

    #[test]
    fn max_shift_sup_rel() {
        let d = line(11);
        let u = ScalarField::from_fn(d, |x| x[0] * x[0]);
        assert_eq!(pointwise_max(&u, &u).unwrap(), u);
        assert_eq!(shift(&u, 0.0), u);
        assert_eq!(sup_rel(&u.shift(-1.0), &u).unwrap(), -1.0);
    }

    #[test]
    fn max_unmasks_where_other_is_finite() {
        let d = line(5);
        let mut mask = vec![false; 5];
        mask[0] = true;
        let u = ScalarField::constant(d, 0.0).with_mask(&mask).unwrap();
        let v = ScalarField::constant(d, -5.0);
        let w = pointwise_max(&u, &v).unwrap();
        assert!(!w.has_mask());
        assert_eq!(w.value(0), -5.0);
        let s = u.add(&v).unwrap();
        assert!(s.is_masked(0));
        assert_eq!(s.value(1), -5.0);
    }
}
