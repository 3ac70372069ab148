//! The model context: grid, gradient body, reference potential and volume.

use crate::body::GradientBody;
use crate::cells;
use crate::error::{Error, Result};
use crate::grid::{DiscreteMeasure, GridDomain, ScalarField};

/// Grid domain plus gradient body, with the reference potential
/// `r = ½ Σ λ_k x_k²` whose slopes fill as much of the body as the domain
/// allows, and the reference volume `ρ = MA(r) / vol(body)`.
#[derive(Debug, Clone)]
pub struct ModelContext {
    domain: GridDomain,
    body: GradientBody,
    lambda: [f64; 2],
    reference: ScalarField,
    reference_ma: Vec<f64>,
    density: DiscreteMeasure,
}

impl ModelContext {
    pub fn new(domain: GridDomain, body: GradientBody) -> Result<Self> {
        if domain.dim() != body.dim() {
            return Err(Error::DomainMismatch);
        }
        let mut lambda = [1.0; 2];
        for (a, l) in lambda.iter_mut().enumerate().take(domain.dim()) {
            let (x0, x1) = domain.bounds(a);
            let (p0, p1) = body.bounds(a);
            let mut best = f64::INFINITY;
            if x1 > 0.0 {
                best = best.min(p1 / x1);
            }
            if x0 < 0.0 {
                best = best.min(p0 / x0);
            }
            *l = best;
        }
        let reference = ScalarField::from_fn(domain, |x| {
            0.5 * (lambda[0] * x[0] * x[0] + lambda[1] * x[1] * x[1])
        });
        let reference_ma = cells::complex(&reference, &body).areas();
        let vol: f64 = reference_ma.iter().sum();
        let weights = reference_ma.iter().map(|w| w / vol).collect();
        let density = DiscreteMeasure::new(domain, weights)?;
        Ok(Self {
            domain,
            body,
            lambda,
            reference,
            reference_ma,
            density,
        })
    }

    /// `[-1, 1]^dim` domain and body.
    pub fn unit(dim: usize, resolution: usize) -> Result<Self> {
        Self::new(
            GridDomain::symmetric(dim, resolution)?,
            GradientBody::unit(dim)?,
        )
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn body(&self) -> &GradientBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `vol(body)`, the mass of every admissible potential.
    pub fn volume(&self) -> f64 {
        self.body.volume()
    }

    /// The reference potential `r`, also the stand-in for `V_θ`.
    pub fn reference_potential(&self) -> &ScalarField {
        &self.reference
    }

    /// Per-axis curvature of `r`.
    pub fn lambda(&self) -> [f64; 2] {
        self.lambda
    }

    /// Slope box of the reference potential, `Π [λ a_k, λ b_k]`.
    pub fn reference_body(&self) -> GradientBody {
        let bounds: Vec<(f64, f64)> = (0..self.dim())
            .map(|a| {
                let (x0, x1) = self.domain.bounds(a);
                (self.lambda[a] * x0.min(0.0), self.lambda[a] * x1.max(0.0))
            })
            .collect();
        GradientBody::new(self.dim(), &bounds).unwrap_or(self.body)
    }

    /// Raw Alexandrov weights of `r`.
    pub fn reference_ma(&self) -> &[f64] {
        &self.reference_ma
    }

    /// The probability measure `ρ`.
    pub fn reference_density(&self) -> &DiscreteMeasure {
        &self.density
    }

    /// Same grid and reference data with another gradient body; used for
    /// the perturbed bodies `P + tQ`.
    pub fn with_body(&self, body: GradientBody) -> Result<Self> {
        if body.dim() != self.dim() {
            return Err(Error::DomainMismatch);
        }
        let mut c = self.clone();
        c.body = body;
        Ok(c)
    }

    /// Same body on another resolution.
    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        Self::new(self.domain.with_resolution(resolution)?, self.body)
    }
}
