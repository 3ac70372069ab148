//! Alexandrov cells of lifted grid points.
//!
//! The cell of an unmasked node `i` is the set of slopes `p` in a box for
//! which the affine function of slope `p` through `(x_i, f_i)` stays below
//! every other lifted point. Cells tile the box (up to boundaries), so their
//! areas sum to the box volume. Boundary nodes own the outward cones.
//!
//! In 2-D a cell is first cut by the eight lattice neighbours and then every
//! vertex is checked against the whole point set; a violating node adds its
//! half-plane and the check repeats. The loop stops once all vertices are
//! supported, which makes the polygon exact up to rounding.

use crate::body::GradientBody;
use crate::grid::ScalarField;

pub(crate) type Point = [f64; 2];

#[derive(Debug, Clone)]
pub(crate) struct Cell {
    /// Polygon vertices in slope space (two points on the axis in 1-D).
    pub poly: Vec<Point>,
    pub area: f64,
    /// Other nodes tight on some vertex of the cell (empty unless requested).
    pub star: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Complex {
    /// `None` for masked nodes and for nodes without a supporting slope.
    pub cells: Vec<Option<Cell>>,
    /// Some node has no supporting slope in the box although it would have
    /// one for a larger box.
    pub clamped: bool,
}

impl Complex {
    pub fn areas(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|c| c.as_ref().map_or(0.0, |c| c.area))
            .collect()
    }
}

/// Scale used for the relative tolerances of the cell computation.
pub(crate) fn scale(u: &ScalarField, body: &GradientBody) -> f64 {
    let d = u.domain();
    let xmax = (0..d.dim())
        .map(|a| {
            let (lo, hi) = d.bounds(a);
            lo.abs().max(hi.abs())
        })
        .fold(0.0, f64::max);
    1.0 + u.sup_abs() + xmax * body.radius() * d.dim() as f64
}

pub(crate) fn complex(u: &ScalarField, body: &GradientBody) -> Complex {
    complex_with(u, body, false)
}

/// [`complex`] with the stars filled in (in 1-D they are always present).
/// In 2-D a flat face puts every node of the face in every star, so stars
/// are only collected on request.
pub(crate) fn complex_with(u: &ScalarField, body: &GradientBody, stars: bool) -> Complex {
    if u.domain().dim() == 1 {
        complex_1d(u, body)
    } else {
        complex_2d(u, body, stars)
    }
}

/// Lower convex hull (indices into `xs`) of points sorted by `x`.
/// Collinear points are dropped.
pub(crate) fn lower_hull(xs: &[f64], fs: &[f64]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(xs.len());
    for k in 0..xs.len() {
        while h.len() >= 2 {
            let a = h[h.len() - 2];
            let b = h[h.len() - 1];
            let cross = (xs[b] - xs[a]) * (fs[k] - fs[a]) - (fs[b] - fs[a]) * (xs[k] - xs[a]);
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(k);
    }
    h
}

/// `max_k (x_k y − f_k)` for every `y` in `ys` (sorted), by a hull sweep.
/// Points with non-finite `f` are ignored; the result is `-inf` when no
/// point is left.
pub(crate) fn conjugate_sorted(xs: &[f64], fs: &[f64], ys: &[f64]) -> Vec<f64> {
    let (px, pf): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(fs)
        .filter(|(_, f)| f.is_finite())
        .map(|(x, f)| (*x, *f))
        .unzip();
    if px.is_empty() {
        return vec![f64::NEG_INFINITY; ys.len()];
    }
    let h = lower_hull(&px, &pf);
    let mut out = Vec::with_capacity(ys.len());
    let mut m = 0;
    for &y in ys {
        // advance while the next hull vertex is at least as good
        while m + 1 < h.len() {
            let (a, b) = (h[m], h[m + 1]);
            if px[b] * y - pf[b] >= px[a] * y - pf[a] {
                m += 1;
            } else {
                break;
            }
        }
        // ys is sorted, but a pointer that moved for a larger y never needs
        // to move back; guard against unsorted input anyway
        while m > 0 {
            let (a, b) = (h[m - 1], h[m]);
            if px[a] * y - pf[a] > px[b] * y - pf[b] {
                m -= 1;
            } else {
                break;
            }
        }
        out.push(px[h[m]] * y - pf[h[m]]);
    }
    out
}

fn complex_1d(u: &ScalarField, body: &GradientBody) -> Complex {
    let d = u.domain();
    let (lo, hi) = body.bounds(0);
    let idx: Vec<usize> = u.unmasked().collect();
    let xs: Vec<f64> = idx.iter().map(|&i| d.coords(i)[0]).collect();
    let fs: Vec<f64> = idx.iter().map(|&i| u.value(i)).collect();
    let mut cells: Vec<Option<Cell>> = vec![None; d.len()];
    let tol = 1e-9 * scale(u, body);
    let mut clamped = false;
    if idx.is_empty() {
        return Complex { cells, clamped };
    }
    let slopes: Vec<f64> = (1..xs.len())
        .map(|k| (fs[k] - fs[k - 1]) / (xs[k] - xs[k - 1]))
        .collect();
    let monotone = slopes.windows(2).all(|w| w[1] >= w[0]);
    // hull vertices (positions in idx) with the slopes on either side
    let verts: Vec<usize> = if monotone {
        (0..idx.len()).collect()
    } else {
        lower_hull(&xs, &fs)
    };
    let edge: Vec<f64> = if monotone {
        slopes
    } else {
        verts
            .windows(2)
            .map(|w| (fs[w[1]] - fs[w[0]]) / (xs[w[1]] - xs[w[0]]))
            .collect()
    };
    for s in &edge {
        if *s < lo - tol || *s > hi + tol {
            clamped = true;
        }
    }
    for (m, &k) in verts.iter().enumerate() {
        let left = if m == 0 { lo } else { edge[m - 1].max(lo) };
        let right = if m + 1 == verts.len() {
            hi
        } else {
            edge[m].min(hi)
        };
        if left > right {
            continue;
        }
        let mut star = Vec::new();
        if m > 0 {
            star.push(idx[verts[m - 1]]);
        }
        if m + 1 < verts.len() {
            star.push(idx[verts[m + 1]]);
        }
        cells[idx[k]] = Some(Cell {
            poly: vec![[left, 0.0], [right, 0.0]],
            area: right - left,
            star,
        });
    }
    Complex { cells, clamped }
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Keeps the part of `poly` where `a·p ≤ b`.
fn clip(poly: &[Point], a: Point, b: f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let p = poly[k];
        let q = poly[(k + 1) % n];
        let dp = dot(a, p) - b;
        let dq = dot(a, q) - b;
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn shoelace(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..n {
        let p = poly[k];
        let q = poly[(k + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s.abs()
}

/// One grid row of lifted points with its lower hull, so that
/// `min_k f_k − x_k v` over the row is a binary search.
struct Row {
    /// Point indices in increasing `x`.
    members: Vec<usize>,
    hull: Vec<usize>,
    /// Slopes of consecutive hull edges (increasing).
    edges: Vec<f64>,
}

struct Lifted {
    node: Vec<usize>,
    x: Vec<f64>,
    y: Vec<f64>,
    f: Vec<f64>,
    rows: Vec<Row>,
}

impl Lifted {
    fn new(u: &ScalarField) -> (Self, Vec<usize>) {
        let d = *u.domain();
        let mut pos = vec![usize::MAX; d.len()];
        let mut pts = Lifted {
            node: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
            f: Vec::new(),
            rows: Vec::new(),
        };
        for iy in 0..d.axis_len(1) {
            let mut members = Vec::new();
            for ix in 0..d.axis_len(0) {
                let i = d.index(ix, iy);
                if u.is_masked(i) {
                    continue;
                }
                let c = d.coords(i);
                pos[i] = pts.node.len();
                members.push(pts.node.len());
                pts.node.push(i);
                pts.x.push(c[0]);
                pts.y.push(c[1]);
                pts.f.push(u.value(i));
            }
            if members.is_empty() {
                continue;
            }
            let xs: Vec<f64> = members.iter().map(|&k| pts.x[k]).collect();
            let fs: Vec<f64> = members.iter().map(|&k| pts.f[k]).collect();
            let hull: Vec<usize> = lower_hull(&xs, &fs)
                .into_iter()
                .map(|m| members[m])
                .collect();
            let edges = hull
                .windows(2)
                .map(|w| (pts.f[w[1]] - pts.f[w[0]]) / (pts.x[w[1]] - pts.x[w[0]]))
                .collect();
            pts.rows.push(Row {
                members,
                hull,
                edges,
            });
        }
        (pts, pos)
    }

    fn g(&self, k: usize, v: Point) -> f64 {
        self.f[k] - self.x[k] * v[0] - self.y[k] * v[1]
    }

    fn row_min(&self, row: &Row, v: Point) -> (f64, usize) {
        let k = row.hull[row.edges.partition_point(|s| *s < v[0])];
        (self.g(k, v), k)
    }

    /// `min_k f_k − ⟨x_k, v⟩` and its argmin.
    fn lowest(&self, v: Point) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for row in &self.rows {
            let cand = self.row_min(row, v);
            if cand.0 < best.0 {
                best = cand;
            }
        }
        best
    }

    /// Points with `f_k − ⟨x_k, v⟩ ≤ thr`.
    fn below(&self, v: Point, thr: f64, out: &mut Vec<usize>) {
        for row in &self.rows {
            if self.row_min(row, v).0 > thr {
                continue;
            }
            out.extend(row.members.iter().copied().filter(|&k| self.g(k, v) <= thr));
        }
    }
}

fn complex_2d(u: &ScalarField, body: &GradientBody, stars: bool) -> Complex {
    let d = *u.domain();
    let (pts, pos) = Lifted::new(u);
    let sc = scale(u, body);
    let eps = 1e-12 * sc;
    let eps_tight = 1e-9 * sc;
    let (lo, hi) = (body.lo(), body.hi());
    let start = vec![
        [lo[0], lo[1]],
        [hi[0], lo[1]],
        [hi[0], hi[1]],
        [lo[0], hi[1]],
    ];
    let nx = d.axis_len(0) as isize;
    let ny = d.axis_len(1) as isize;
    let mut cells: Vec<Option<Cell>> = vec![None; d.len()];
    let mut clamped = false;

    for (me, &i) in pts.node.iter().enumerate() {
        let xi = [pts.x[me], pts.y[me]];
        let fi = pts.f[me];
        let mut poly = start.clone();
        let mut margin = 0.0f64;
        let cut = |poly: &mut Vec<Point>, k: usize, margin: &mut f64| {
            let a = [pts.x[k] - xi[0], pts.y[k] - xi[1]];
            let b = pts.f[k] - fi;
            let next = clip(poly, a, b);
            if next.is_empty() {
                let na = dot(a, a).sqrt();
                *margin = poly
                    .iter()
                    .map(|p| (dot(a, *p) - b) / na)
                    .fold(f64::INFINITY, f64::min);
            }
            *poly = next;
        };
        let (ix, iy) = d.multi_index(i);
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (jx, jy) = (ix as isize + dx, iy as isize + dy);
                if jx < 0 || jy < 0 || jx >= nx || jy >= ny {
                    continue;
                }
                let j = d.index(jx as usize, jy as usize);
                if pos[j] != usize::MAX && !poly.is_empty() {
                    cut(&mut poly, pos[j], &mut margin);
                }
            }
        }
        let mut star: Vec<usize> = Vec::new();
        for _round in 0..512 {
            if poly.is_empty() {
                break;
            }
            let mut violators: Vec<usize> = Vec::new();
            for v in &poly {
                let gi = fi - dot(xi, *v);
                let (g, k) = pts.lowest(*v);
                if g < gi - eps && k != me {
                    violators.push(k);
                }
            }
            if violators.is_empty() {
                let mut tight = Vec::new();
                for v in poly.iter().filter(|_| stars) {
                    pts.below(*v, fi - dot(xi, *v) + eps_tight, &mut tight);
                }
                star.extend(tight.into_iter().filter(|&k| k != me).map(|k| pts.node[k]));
                break;
            }
            violators.sort_unstable();
            violators.dedup();
            for k in violators {
                if poly.is_empty() {
                    break;
                }
                cut(&mut poly, k, &mut margin);
            }
        }
        if poly.is_empty() {
            if margin > 1e-9 * (1.0 + body.radius()) && body_limited(&pts, me, body) {
                clamped = true;
            }
            continue;
        }
        star.sort_unstable();
        star.dedup();
        let area = shoelace(&poly);
        cells[i] = Some(Cell { poly, area, star });
    }
    Complex { cells, clamped }
}

/// Whether node `me` would be supported by some slope outside `body`,
/// i.e. it is a vertex of the unconstrained lower hull. Used only to tell
/// clamping apart from non-convexity.
fn body_limited(pts: &Lifted, me: usize, body: &GradientBody) -> bool {
    let big = body.radius() * 1e3 + 1e3;
    let xi = [pts.x[me], pts.y[me]];
    let fi = pts.f[me];
    let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for _ in 0..512 {
        let mut worst = None;
        for v in &poly {
            let gi = fi - dot(xi, *v);
            let (g, k) = pts.lowest(*v);
            if g < gi - 1e-12 * (1.0 + gi.abs()) && k != me {
                worst = Some(k);
                break;
            }
        }
        match worst {
            None => return !poly.is_empty(),
            Some(k) => {
                let a = [pts.x[k] - xi[0], pts.y[k] - xi[1]];
                poly = clip(&poly, a, pts.f[k] - fi);
                if poly.is_empty() {
                    return false;
                }
            }
        }
    }
    false
}
