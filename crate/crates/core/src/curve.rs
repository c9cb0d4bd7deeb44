//! Rectifiable parametric curves in R³ (equivalently in E3).
//!
//! Every curve is parametrized over `t ∈ [0, 1]` and is materialized as a
//! polyline on demand: `n` uniform parameter steps, merged with the curve's
//! breakpoints (polyline corners, junctions of concatenated pieces) so that
//! piecewise curves are reproduced exactly by their discretization.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::homotopy::Homotopy;
use crate::space::PointE3;

/// Endpoint distance below which a curve counts as closed.
pub const CLOSED_TOLERANCE: f64 = 1e-12;

/// Tolerance used when matching the endpoints of concatenated pieces.
const JOIN_TOLERANCE: f64 = 1e-9;

/// Parameters below this distance from a grid node are merged into it.
const PARAM_MERGE: f64 = 1e-14;

/// A closed loop `c + r(θ)(u cos θ + v sin θ) + h sin(kθ) w`
/// with `r(θ) = radius (1 + amplitude cos(lobes θ))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WobblyLoop {
    pub center: PointE3,
    pub u: PointE3,
    pub v: PointE3,
    pub w: PointE3,
    pub radius: f64,
    pub amplitude: f64,
    pub lobes: u32,
    pub lift: f64,
    pub lift_frequency: u32,
}

#[derive(Debug)]
enum Shape {
    /// Parametrized by arclength fraction; `params[i]` belongs to `vertices[i]`.
    Polyline { vertices: Vec<PointE3>, params: Vec<f64> },
    /// `c + u cos 2πθ + v sin 2πθ` for `θ` running from `start` to `end` (in turns).
    Ellipse { center: PointE3, u: PointE3, v: PointE3, start: f64, end: f64 },
    Wobbly(WobblyLoop),
    /// Pieces share the parameter range equally.
    Concat(Vec<Curve>),
    SubArc { base: Curve, t0: f64, t1: f64 },
    Level { homotopy: Homotopy, s: f64 },
    Transversal { homotopy: Homotopy, t: f64, s0: f64, s1: f64 },
}

/// An oriented parametric curve.
#[derive(Clone, Debug)]
pub struct Curve {
    shape: Arc<Shape>,
    reversed: bool,
}

/// Points `ζ_{0,k}` cut from a curve at successive arclength `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSubdivision {
    /// Curve parameters `t_0 = 0 < t_1 < ... < t_n`.
    pub params: Vec<f64>,
    /// `ζ_{0,k} = γ(t_k)`.
    pub points: Vec<PointE3>,
    /// Arclength positions of the cut points, followed by the total length
    /// (the return to `t = 1`).
    pub positions: Vec<f64>,
    pub length: f64,
    pub rho: f64,
}

impl ArcSubdivision {
    /// Number of full `rho` arcs; the points are `ζ_{0,0..=n}`.
    pub fn n(&self) -> usize {
        self.params.len() - 1
    }

    /// Lengths of the `n + 1` arcs, the last one ending at `t = 1`.
    pub fn arc_lengths(&self) -> Vec<f64> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

impl Curve {
    fn from_shape(shape: Shape) -> Curve {
        Curve { shape: Arc::new(shape), reversed: false }
    }

    pub fn segment(a: PointE3, b: PointE3) -> Curve {
        Curve::from_shape(Shape::Polyline { vertices: vec![a, b], params: vec![0.0, 1.0] })
    }

    /// A polyline through `vertices`; `closed` appends the closing edge.
    pub fn polyline(vertices: Vec<PointE3>, closed: bool) -> Result<Curve> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("a polyline needs at least two vertices".into()));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve("non-finite polyline vertex".into()));
        }
        let mut vertices = vertices;
        if closed && vertices[0].distance(vertices.last().unwrap()) > CLOSED_TOLERANCE {
            vertices.push(vertices[0]);
        }
        let mut cum = Vec::with_capacity(vertices.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in vertices.windows(2) {
            acc += w[0].distance(&w[1]);
            cum.push(acc);
        }
        if acc == 0.0 {
            // Degenerate (constant) polyline: spread parameters uniformly.
            let m = (vertices.len() - 1) as f64;
            cum = (0..vertices.len()).map(|i| i as f64 / m).collect();
        } else {
            for c in cum.iter_mut() {
                *c /= acc;
            }
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Curve::from_shape(Shape::Polyline { vertices, params: cum }))
    }

    pub fn constant(p: PointE3) -> Curve {
        Curve::from_shape(Shape::Polyline { vertices: vec![p, p], params: vec![0.0, 1.0] })
    }

    /// Full ellipse `c + u cos 2πt + v sin 2πt`.
    pub fn ellipse(center: PointE3, u: PointE3, v: PointE3) -> Curve {
        Curve::arc(center, u, v, 0.0, 1.0)
    }

    /// Circle of radius `r` in the plane `z = center.z`.
    pub fn circle_xy(center: PointE3, r: f64) -> Curve {
        Curve::ellipse(center, PointE3::new(r, 0.0, 0.0), PointE3::new(0.0, r, 0.0))
    }

    /// Elliptic arc from `start` to `end`, both measured in turns.
    pub fn arc(center: PointE3, u: PointE3, v: PointE3, start: f64, end: f64) -> Curve {
        Curve::from_shape(Shape::Ellipse { center, u, v, start, end })
    }

    pub fn wobbly(spec: WobblyLoop) -> Curve {
        Curve::from_shape(Shape::Wobbly(spec))
    }

    /// Joins curves end to end; consecutive endpoints must coincide.
    pub fn concat(parts: Vec<Curve>) -> Result<Curve> {
        if parts.is_empty() {
            return Err(Error::InvalidCurve("concatenation of zero curves".into()));
        }
        for (i, w) in parts.windows(2).enumerate() {
            let gap = w[0].eval(1.0).distance(&w[1].eval(0.0));
            if gap > JOIN_TOLERANCE {
                return Err(Error::InvalidCurve(format!("gap {gap:e} between pieces {i} and {}", i + 1)));
            }
        }
        Ok(Curve::from_shape(Shape::Concat(parts)))
    }

    /// The arc of `self` between parameters `t0` and `t1`, reparametrized to `[0, 1]`.
    pub fn sub_arc(&self, t0: f64, t1: f64) -> Curve {
        Curve::from_shape(Shape::SubArc { base: self.clone(), t0, t1 })
    }

    pub(crate) fn level(homotopy: Homotopy, s: f64) -> Curve {
        Curve::from_shape(Shape::Level { homotopy, s })
    }

    pub(crate) fn transversal(homotopy: Homotopy, t: f64, s0: f64, s1: f64) -> Curve {
        Curve::from_shape(Shape::Transversal { homotopy, t, s0, s1 })
    }

    /// Same point set, opposite orientation.
    pub fn reversed(&self) -> Curve {
        Curve { shape: Arc::clone(&self.shape), reversed: !self.reversed }
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn eval(&self, t: f64) -> PointE3 {
        let t = if self.reversed { 1.0 - t } else { t };
        self.shape.eval(t.clamp(0.0, 1.0))
    }

    /// Endpoint coincidence within [`CLOSED_TOLERANCE`].
    pub fn is_closed(&self) -> bool {
        self.eval(0.0).distance(&self.eval(1.0)) <= CLOSED_TOLERANCE
    }

    /// Interior parameters where the curve may have a corner.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.shape.breakpoints();
        if self.reversed {
            b = b.into_iter().map(|t| 1.0 - t).collect();
        }
        b.sort_by(f64::total_cmp);
        b
    }

    /// Sample parameters: `j/n` for `j = 0..=n` merged with the breakpoints.
    pub fn params(&self, n: usize) -> Vec<f64> {
        merge_params(uniform_params(n), self.breakpoints())
    }

    /// Polyline vertices at resolution `n` (see [`Curve::params`]). Reversing a
    /// curve reverses this list exactly.
    pub fn points(&self, n: usize) -> Vec<PointE3> {
        if self.reversed {
            let mut pts = self.reversed().points(n);
            pts.reverse();
            pts
        } else {
            self.params(n).iter().map(|&t| self.shape.eval(t)).collect()
        }
    }

    pub fn points_at(&self, params: &[f64]) -> Vec<PointE3> {
        params.iter().map(|&t| self.eval(t)).collect()
    }

    /// Arclength of the materialized polyline at resolution `n`.
    pub fn mes(&self, n: usize) -> Result<f64> {
        if n < 1 {
            return Err(Error::Resolution { min: 1, got: n });
        }
        Ok(polyline_length(&self.points(n)))
    }

    /// Cuts the curve at arclength steps of `rho`, measured on the polyline at
    /// `resolution`. Requires `0 < rho < mes / 2`.
    pub fn subdivide_by_arclength(&self, rho: f64, resolution: usize) -> Result<ArcSubdivision> {
        if resolution < 1 {
            return Err(Error::Resolution { min: 1, got: resolution });
        }
        let params = self.params(resolution);
        let pts = self.points_at(&params);
        let mut cum = Vec::with_capacity(pts.len());
        cum.push(0.0);
        for w in pts.windows(2) {
            cum.push(cum.last().unwrap() + w[0].distance(&w[1]));
        }
        let length = *cum.last().unwrap();
        if !(rho > 0.0 && rho < 0.5 * length) {
            return Err(Error::RhoOutOfRange { rho, max: 0.5 * length });
        }
        let mut cut_params = vec![0.0];
        let mut positions = vec![0.0];
        let mut seg = 0;
        let mut k = 1usize;
        loop {
            let target = k as f64 * rho;
            // A final arc shorter than this is absorbed into the previous one.
            if target >= length * (1.0 - 1e-12) {
                break;
            }
            while cum[seg + 1] < target {
                seg += 1;
            }
            let span = cum[seg + 1] - cum[seg];
            let w = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
            cut_params.push(params[seg] + w * (params[seg + 1] - params[seg]));
            positions.push(target);
            k += 1;
        }
        positions.push(length);
        let points = self.points_at(&cut_params);
        Ok(ArcSubdivision { params: cut_params, points, positions, length, rho })
    }
}

impl Shape {
    fn eval(&self, t: f64) -> PointE3 {
        match self {
            Shape::Polyline { vertices, params } => {
                let i = match params.binary_search_by(|p| p.total_cmp(&t)) {
                    Ok(i) => return vertices[i],
                    Err(i) => i.clamp(1, params.len() - 1),
                };
                let span = params[i] - params[i - 1];
                let w = if span > 0.0 { (t - params[i - 1]) / span } else { 0.0 };
                vertices[i - 1].lerp(&vertices[i], w)
            }
            Shape::Ellipse { center, u, v, start, end } => {
                let theta = TAU * (start + t * (end - start));
                *center + *u * theta.cos() + *v * theta.sin()
            }
            Shape::Wobbly(w) => {
                let theta = TAU * t;
                let r = w.radius * (1.0 + w.amplitude * (w.lobes as f64 * theta).cos());
                w.center
                    + (w.u * theta.cos() + w.v * theta.sin()) * r
                    + w.w * (w.lift * (w.lift_frequency as f64 * theta).sin())
            }
            Shape::Concat(parts) => {
                let m = parts.len();
                let scaled = t * m as f64;
                let idx = (scaled.floor() as usize).min(m - 1);
                parts[idx].eval(scaled - idx as f64)
            }
            Shape::SubArc { base, t0, t1 } => base.eval(t0 + t * (t1 - t0)),
            Shape::Level { homotopy, s } => homotopy.eval(*s, t),
            Shape::Transversal { homotopy, t: tt, s0, s1 } => homotopy.eval(s0 + t * (s1 - s0), *tt),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Shape::Polyline { params, .. } => params[1..params.len() - 1].to_vec(),
            Shape::Ellipse { .. } | Shape::Wobbly(_) | Shape::Transversal { .. } => Vec::new(),
            Shape::Concat(parts) => {
                let m = parts.len() as f64;
                let mut out = Vec::new();
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push(i as f64 / m);
                    }
                    out.extend(part.breakpoints().into_iter().map(|b| (i as f64 + b) / m));
                }
                out
            }
            Shape::SubArc { base, t0, t1 } => base
                .breakpoints()
                .into_iter()
                .map(|b| (b - t0) / (t1 - t0))
                .filter(|&u| u > 0.0 && u < 1.0)
                .collect(),
            Shape::Level { homotopy, s } => homotopy.level_breakpoints(*s),
        }
    }
}

pub(crate) fn uniform_params(n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|j| j as f64 / n as f64).collect()
}

/// Sorted union of `grid` and `extra`, dropping extras within
/// [`PARAM_MERGE`] of an existing parameter.
pub(crate) fn merge_params(grid: Vec<f64>, extra: Vec<f64>) -> Vec<f64> {
    let mut all = grid;
    all.extend(extra.into_iter().filter(|t| *t > 0.0 && *t < 1.0));
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for t in all {
        match out.last() {
            Some(&last) if t - last <= PARAM_MERGE => {
                // Keep the exact endpoint 1.0 when it collides with an extra.
                if t == 1.0 {
                    *out.last_mut().unwrap() = 1.0;
                }
            }
            _ => out.push(t),
        }
    }
    out
}

pub fn polyline_length(points: &[PointE3]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}
