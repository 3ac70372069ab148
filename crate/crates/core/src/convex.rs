//! Convexity tests, discrete Legendre transforms and constrained envelopes.

use serde::{Deserialize, Serialize};

use crate::body::GradientBody;
use crate::cells::{self, conjugate_sorted, lower_hull};
use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::grid::{check_domains, GridDomain, ScalarField};

/// Slope lattice `k * h` inside a gradient body. The origin is always a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualGrid {
    body: GradientBody,
    spacing: [f64; 2],
    kmin: [i64; 2],
    kmax: [i64; 2],
}

impl DualGrid {
    /// `resolution` is the number of lattice steps across each axis of the
    /// body plus one, as for a primal grid.
    pub fn new(body: GradientBody, resolution: usize) -> Result<Self> {
        if resolution < 3 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        let mut spacing = [1.0; 2];
        let mut kmin = [0i64; 2];
        let mut kmax = [0i64; 2];
        for a in 0..body.dim() {
            let (lo, hi) = body.bounds(a);
            let h = (hi - lo) / (resolution - 1) as f64;
            spacing[a] = h;
            kmin[a] = (lo / h - 1e-9).ceil() as i64;
            kmax[a] = (hi / h + 1e-9).floor() as i64;
        }
        Ok(Self {
            body,
            spacing,
            kmin,
            kmax,
        })
    }

    pub fn body(&self) -> &GradientBody {
        &self.body
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        if axis < self.body.dim() {
            (self.kmax[axis] - self.kmin[axis] + 1) as usize
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.axis_len(0) * self.axis_len(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_slopes(&self, axis: usize) -> Vec<f64> {
        if axis >= self.body.dim() {
            return vec![0.0];
        }
        (self.kmin[axis]..=self.kmax[axis])
            .map(|k| k as f64 * self.spacing[axis])
            .collect()
    }

    /// Slope of lattice node `j` (first axis fastest).
    pub fn slope(&self, j: usize) -> [f64; 2] {
        let n0 = self.axis_len(0);
        let (a, b) = (j % n0, j / n0);
        let s0 = (self.kmin[0] + a as i64) as f64 * self.spacing[0];
        let s1 = if self.body.dim() == 2 {
            (self.kmin[1] + b as i64) as f64 * self.spacing[1]
        } else {
            0.0
        };
        [s0, s1]
    }
}

/// Values on a [`DualGrid`]; `-inf` marks slopes where the conjugate is
/// undefined (no finite primal node).
#[derive(Debug, Clone, PartialEq)]
pub struct DualField {
    pub grid: DualGrid,
    pub values: Vec<f64>,
}

impl DualField {
    pub fn value_at(&self, j: usize) -> f64 {
        self.values[j]
    }
}

/// Separable conjugate of tensor data: `max_{a,b} x_a y_c + x'_b y'_d − v[a,b]`,
/// skipping non-finite entries. `vals` is first-axis fastest.
fn conjugate_tensor(xs: &[f64], xs2: &[f64], vals: &[f64], ys: &[f64], ys2: &[f64]) -> Vec<f64> {
    let n0 = xs.len();
    // row conjugates: g[b][c] = max_a x_a y_c − v[a,b]
    let rows: Vec<Vec<f64>> = (0..xs2.len())
        .map(|b| conjugate_sorted(xs, &vals[b * n0..(b + 1) * n0], ys))
        .collect();
    let mut out = vec![f64::NEG_INFINITY; ys.len() * ys2.len()];
    let mut col = vec![0.0; xs2.len()];
    for c in 0..ys.len() {
        for b in 0..xs2.len() {
            // conjugating -g over the second axis; rows without finite
            // nodes drop out as +inf
            col[b] = if rows[b][c].is_finite() {
                -rows[b][c]
            } else {
                f64::INFINITY
            };
        }
        let g = conjugate_sorted(xs2, &col, ys2);
        for (d, v) in g.into_iter().enumerate() {
            out[c + d * ys.len()] = v;
        }
    }
    out
}

fn axis_coords(d: &GridDomain, axis: usize) -> Vec<f64> {
    if axis >= d.dim() {
        return vec![0.0];
    }
    (0..d.axis_len(axis))
        .map(|k| d.axis_coord(axis, k))
        .collect()
}

/// Discrete Legendre transform `u*(y) = max_x ⟨x, y⟩ − u(x)` over unmasked
/// nodes, evaluated on the dual lattice.
pub fn legendre(u: &ScalarField, dual: &DualGrid) -> Result<DualField> {
    let d = u.domain();
    if d.dim() != dual.body().dim() {
        return Err(Error::DomainMismatch);
    }
    if u.unmasked().next().is_none() {
        return Err(Error::AllMasked);
    }
    let values = conjugate_tensor(
        &axis_coords(d, 0),
        &axis_coords(d, 1),
        u.values(),
        &dual.axis_slopes(0),
        &dual.axis_slopes(1),
    );
    Ok(DualField {
        grid: *dual,
        values,
    })
}

/// Conjugate of a dual field back onto a primal grid.
pub fn legendre_back(v: &DualField, domain: &GridDomain) -> Result<ScalarField> {
    if domain.dim() != v.grid.body().dim() {
        return Err(Error::DomainMismatch);
    }
    let vals: Vec<f64> = v
        .values
        .iter()
        .map(|x| if x.is_finite() { *x } else { f64::INFINITY })
        .collect();
    let out = conjugate_tensor(
        &v.grid.axis_slopes(0),
        &v.grid.axis_slopes(1),
        &vals,
        &axis_coords(domain, 0),
        &axis_coords(domain, 1),
    );
    ScalarField::new(*domain, out)
}

/// Exact envelope in a slope box: the sup of affine minorants of `f` with
/// slope in `body`, at every unmasked node. Masked nodes stay masked.
pub(crate) fn envelope_in(f: &ScalarField, body: &GradientBody) -> Result<ScalarField> {
    let d = *f.domain();
    if d.dim() != body.dim() {
        return Err(Error::DomainMismatch);
    }
    if f.unmasked().next().is_none() {
        return Err(Error::NoMinorant);
    }
    let snap = 1e-12 * cells::scale(f, body);
    let raw = if d.dim() == 1 {
        envelope_1d(f, body)
    } else {
        envelope_2d(f, body)
    };
    let mut values = f.values().to_vec();
    for i in f.unmasked() {
        let fi = f.value(i);
        if raw[i] < fi - snap {
            values[i] = raw[i];
        }
    }
    ScalarField::new(d, values)
}

fn envelope_1d(f: &ScalarField, body: &GradientBody) -> Vec<f64> {
    let d = f.domain();
    let (lo, hi) = body.bounds(0);
    let idx: Vec<usize> = f.unmasked().collect();
    let xs: Vec<f64> = idx.iter().map(|&i| d.coords(i)[0]).collect();
    let fs: Vec<f64> = idx.iter().map(|&i| f.value(i)).collect();
    let h = lower_hull(&xs, &fs);
    // breakpoints of the conjugate restricted to [lo, hi]
    let mut ys = vec![lo];
    for w in h.windows(2) {
        let s = (fs[w[1]] - fs[w[0]]) / (xs[w[1]] - xs[w[0]]);
        if s > lo && s < hi {
            ys.push(s);
        }
    }
    ys.push(hi);
    let fstar = conjugate_sorted(&xs, &fs, &ys);
    let env = conjugate_sorted(&ys, &fstar, &xs);
    let mut out = vec![f64::NEG_INFINITY; d.len()];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = env[k];
    }
    out
}

fn envelope_2d(f: &ScalarField, body: &GradientBody) -> Vec<f64> {
    let d = f.domain();
    let cx = cells::complex(f, body);
    // every vertex of the clipped complex with c = -f*(v)
    let mut verts: Vec<([f64; 2], f64)> = Vec::new();
    for i in f.unmasked() {
        if let Some(cell) = &cx.cells[i] {
            let x = d.coords(i);
            for v in &cell.poly {
                verts.push((*v, f.value(i) - x[0] * v[0] - x[1] * v[1]));
            }
        }
    }
    let mut out = vec![f64::NEG_INFINITY; d.len()];
    for i in f.unmasked() {
        if cx.cells[i].is_some() {
            out[i] = f.value(i);
            continue;
        }
        let x = d.coords(i);
        out[i] = verts
            .iter()
            .map(|(v, c)| x[0] * v[0] + x[1] * v[1] + c)
            .fold(f64::NEG_INFINITY, f64::max);
    }
    out
}

/// Largest convex function below `f` with subgradients in the context's
/// gradient body.
pub fn p_envelope(ctx: &ModelContext, f: &ScalarField) -> Result<ScalarField> {
    check_domains(ctx.domain(), f.domain())?;
    envelope_in(f, ctx.body())
}

/// Slope box large enough that the unconstrained lower hull of `f` has all
/// its facet slopes inside.
fn unconstrained_box(f: &ScalarField) -> GradientBody {
    let d = f.domain();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in f.unmasked() {
        lo = lo.min(f.value(i));
        hi = hi.max(f.value(i));
    }
    let osc = if hi > lo { hi - lo } else { 0.0 };
    let h = (0..d.dim())
        .map(|a| d.spacing(a))
        .fold(f64::INFINITY, f64::min);
    let half = osc * 2.0 * d.diameter() / (h * h) + 1.0;
    GradientBody::cube(d.dim(), half)
}

/// Largest convex function below `f` (no slope constraint).
pub fn convex_envelope(f: &ScalarField) -> Result<ScalarField> {
    envelope_in(f, &unconstrained_box(f))
}

/// True iff `u` equals its convex envelope on unmasked nodes within
/// `1e-10 * max(1, sup|u|)`.
pub fn is_convex(u: &ScalarField) -> bool {
    if u.unmasked().next().is_none() {
        return true;
    }
    convexity_gap(u) <= 1e-10 * u.sup_abs().max(1.0)
}

/// `sup (u − conv u)` over unmasked nodes.
pub fn convexity_gap(u: &ScalarField) -> f64 {
    match convex_envelope(u) {
        Ok(env) => u
            .unmasked()
            .map(|i| u.value(i) - env.value(i))
            .fold(0.0, f64::max),
        Err(_) => 0.0,
    }
}

/// Default contact tolerance `1e-8 (1 + sup|f|)`.
pub fn default_contact_tol(f: &ScalarField) -> f64 {
    1e-8 * (1.0 + f.sup_abs())
}

/// Nodes where the envelope touches its obstacle. Nodes masked in `f` are
/// never in the contact set.
pub fn contact_set(f: &ScalarField, env: &ScalarField, tol: f64) -> Result<Vec<bool>> {
    check_domains(f.domain(), env.domain())?;
    let mut out = vec![false; f.domain().len()];
    for i in f.unmasked() {
        if env.is_masked(i) {
            continue;
        }
        let gap = f.value(i) - env.value(i);
        if gap < -tol {
            return Err(Error::EnvelopeAboveObstacle(-gap, i));
        }
        out[i] = gap <= tol;
    }
    Ok(out)
}
