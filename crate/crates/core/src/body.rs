//! Gradient bodies: the admissible slope sets of potentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box of slopes with the origin in its interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientBody {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl GradientBody {
    pub fn new(dim: usize, bounds: &[(f64, f64)]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if bounds.len() != dim {
            return Err(Error::BoundsArity {
                expected: dim,
                got: bounds.len(),
            });
        }
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for (axis, &(a, b)) in bounds.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < 0.0 && b > 0.0) {
                return Err(Error::InvalidBody);
            }
            lo[axis] = a;
            hi[axis] = b;
        }
        Ok(Self { dim, lo, hi })
    }

    /// `[-1, 1]^dim`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(dim, &vec![(-1.0, 1.0); dim.min(3)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        (self.lo[axis], self.hi[axis])
    }

    pub fn lo(&self) -> [f64; 2] {
        self.lo
    }

    pub fn hi(&self) -> [f64; 2] {
        self.hi
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim)
            .map(|a| (self.hi[a] - self.lo[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest `|p|_inf` over the body.
    pub fn radius(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.lo[a].abs().max(self.hi[a]))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        (0..self.dim).all(|a| p[a] >= self.lo[a] - tol && p[a] <= self.hi[a] + tol)
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DomainMismatch);
        }
        let mut out = *self;
        for a in 0..self.dim {
            out.lo[a] += other.lo[a];
            out.hi[a] += other.hi[a];
        }
        Ok(out)
    }

    /// `t * body`; `t` must be positive.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NegativeParameter(t));
        }
        let mut out = *self;
        for a in 0..self.dim {
            out.lo[a] *= t;
            out.hi[a] *= t;
        }
        Ok(out)
    }

    /// Symmetric box of half-width `half` in every axis. Used for
    /// unconstrained envelopes, where the slope box only has to be large.
    pub(crate) fn cube(dim: usize, half: f64) -> Self {
        Self {
            dim,
            lo: [-half; 2],
            hi: [half; 2],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_and_sum() {
        let b = GradientBody::unit(2).unwrap();
        assert_eq!(b.volume(), 4.0);
        let s = b.minkowski_sum(&b.scaled(0.5).unwrap()).unwrap();
        assert_eq!(s.bounds(0), (-1.5, 1.5));
        assert_eq!(s.volume(), 9.0);
        assert!(b.contains([1.0, -1.0], 0.0));
        assert!(!b.contains([1.1, 0.0], 0.0));
    }

    #[test]
    fn origin_must_be_interior() {
        assert_eq!(GradientBody::new(1, &[(0.0, 1.0)]), Err(Error::InvalidBody));
        assert!(GradientBody::new(3, &[(-1.0, 1.0); 3]).is_err());
    }
}
