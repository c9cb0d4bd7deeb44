//! Curvilinear integrals `∫ dζ Ψ(ζ)` and `∫ Ψ(ζ) dζ` over polylines.
//!
//! `dζ = dx i1 + dy i2 + dz i3`. The product-form sums place the increment on
//! the left (`Side::Right`) or on the right (`Side::Left`) of the integrand.
//! Segments are summed in fixed-size chunks whose partial sums are combined
//! in index order, so results do not depend on the thread count.

use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexScalar, Quaternion};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::maps::{GenericMap, Side};
use crate::space::{GeneratorTriple, PointE3};

const CHUNK: usize = 256;

/// Where the integrand is sampled on each segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    LeftEndpoint,
    Trapezoid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Resolution for single integrations.
    pub n: usize,
    /// Strictly increasing resolutions for refinement.
    pub schedule: Vec<usize>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rule: Rule::Trapezoid, n: 1024, schedule: (5..=12).map(|k| 1usize << k).collect() }
    }
}

impl QuadratureSpec {
    pub fn new(rule: Rule, n: usize, schedule: Vec<usize>) -> Result<Self> {
        let q = QuadratureSpec { rule, n, schedule };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidQuadrature(format!("n = {} < 2", self.n)));
        }
        if self.schedule.is_empty() {
            return Err(Error::InvalidQuadrature("empty refinement schedule".into()));
        }
        if self.schedule[0] < 2 {
            return Err(Error::InvalidQuadrature(format!("schedule entry {} < 2", self.schedule[0])));
        }
        if self.schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidQuadrature("schedule is not strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: Quaternion,
    /// Requested resolution.
    pub n: usize,
    /// Segments actually summed (resolution plus curve breakpoints).
    pub segments: usize,
    /// `norm_e` of the difference from the previous (coarser) evaluation.
    pub error_estimate: f64,
}

fn product(side: Side, dz: Quaternion, psi: Quaternion) -> Quaternion {
    match side {
        Side::Right => dz * psi,
        Side::Left => psi * dz,
    }
}

fn sample_values(points: &[PointE3], g: &GenericMap) -> std::result::Result<Vec<Quaternion>, (usize, crate::error::EvalError)> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points
            .par_iter()
            .enumerate()
            .map(|(j, p)| g.eval(p).map_err(|e| (j, e)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().enumerate().map(|(j, p)| g.eval(p).map_err(|e| (j, e))).collect()
    }
}

fn chunked_sum<F>(segments: usize, term: F) -> Quaternion
where
    F: Fn(usize) -> Quaternion + Sync + Send,
{
    let chunk_sum = |c: usize| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(segments);
        (lo..hi).fold(Quaternion::ZERO, |acc, j| acc + term(j))
    };
    let chunks = segments.div_ceil(CHUNK);
    #[cfg(feature = "parallel")]
    let partials: Vec<Quaternion> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(chunk_sum).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Quaternion> = (0..chunks).map(chunk_sum).collect();
    partials.into_iter().fold(Quaternion::ZERO, |acc, q| acc + q)
}

/// Weights of the two segment endpoints under `rule`.
fn weights(rule: Rule) -> (f64, f64) {
    match rule {
        Rule::LeftEndpoint => (1.0, 0.0),
        Rule::Trapezoid => (0.5, 0.5),
    }
}

/// Product-form sum over the polyline `points`. On failure returns the index
/// of the offending vertex.
pub fn integrate_points(
    points: &[PointE3],
    g: &GenericMap,
    gen: &GeneratorTriple,
    rule: Rule,
    side: Side,
) -> std::result::Result<Quaternion, (usize, crate::error::EvalError)> {
    if points.len() < 2 {
        return Ok(Quaternion::ZERO);
    }
    let values = sample_values(points, g)?;
    let (wa, wb) = weights(rule);
    Ok(chunked_sum(points.len() - 1, |j| {
        let dz = gen.embed(&(points[j + 1] - points[j]));
        let psi = if wb == 0.0 { values[j] } else { values[j] * wa + values[j + 1] * wb };
        product(side, dz, psi)
    }))
}

/// Componentwise evaluation of the same discrete integral: real sums of
/// `U_k, V_k` against `dx, dy, dz`, recombined with `e_k`, `i2 e_k`, `i3 e_k`
/// (or `e_k i2`, `e_k i3` for `Side::Left`) and the imaginary unit.
pub fn oracle_points(
    points: &[PointE3],
    g: &GenericMap,
    gen: &GeneratorTriple,
    rule: Rule,
    side: Side,
) -> std::result::Result<Quaternion, (usize, crate::error::EvalError)> {
    if points.len() < 2 {
        return Ok(Quaternion::ZERO);
    }
    let cf = g.component_functions();
    let samples: Vec<[f64; 8]> = points
        .iter()
        .enumerate()
        .map(|(j, p)| cf.sample(p).map_err(|e| (j, e)))
        .collect::<std::result::Result<_, _>>()?;
    let (wa, wb) = weights(rule);
    // sums[k][0..3]: ∫U_k dx, dy, dz; sums[k][3..6]: ∫V_k dx, dy, dz.
    let mut sums = [[0.0f64; 6]; 4];
    for j in 0..points.len() - 1 {
        let d = points[j + 1] - points[j];
        for k in 0..4 {
            let u = wa * samples[j][2 * k] + wb * samples[j + 1][2 * k];
            let v = wa * samples[j][2 * k + 1] + wb * samples[j + 1][2 * k + 1];
            sums[k][0] += u * d.x;
            sums[k][1] += u * d.y;
            sums[k][2] += u * d.z;
            sums[k][3] += v * d.x;
            sums[k][4] += v * d.y;
            sums[k][5] += v * d.z;
        }
    }
    let i = ComplexScalar::new(0.0, 1.0);
    let (i2, i3) = (gen.i2(), gen.i3());
    let mut total = Quaternion::ZERO;
    for (k, s) in sums.iter().enumerate() {
        let ek = Quaternion::basis(k);
        let (i2ek, i3ek) = match side {
            Side::Right => (i2 * ek, i3 * ek),
            Side::Left => (ek * i2, ek * i3),
        };
        total += ek * s[0] + i2ek * s[1] + i3ek * s[2];
        total += (ek * s[3] + i2ek * s[4] + i3ek * s[5]) * i;
    }
    Ok(total)
}

fn locate(curve_params: &[f64], (index, source): (usize, crate::error::EvalError)) -> Error {
    Error::Evaluation { t: curve_params[index], index, source }
}

/// Curve parameters for resolution `n`, in the curve's own orientation.
fn oriented_params(curve: &Curve, n: usize) -> Vec<f64> {
    if curve.is_reversed() {
        let mut p: Vec<f64> = curve.reversed().params(n).into_iter().map(|t| 1.0 - t).collect();
        p.reverse();
        p
    } else {
        curve.params(n)
    }
}

fn integrate_at(curve: &Curve, g: &GenericMap, gen: &GeneratorTriple, rule: Rule, side: Side, n: usize) -> Result<(Quaternion, usize)> {
    let pts = curve.points(n);
    integrate_points(&pts, g, gen, rule, side)
        .map(|v| (v, pts.len() - 1))
        .map_err(|e| locate(&oriented_params(curve, n), e))
}

fn integrate(curve: &Curve, g: &GenericMap, gen: &GeneratorTriple, q: &QuadratureSpec, side: Side) -> Result<IntegralResult> {
    q.validate()?;
    let (value, segments) = integrate_at(curve, g, gen, q.rule, side, q.n)?;
    let (coarse, _) = integrate_at(curve, g, gen, q.rule, side, (q.n / 2).max(1))?;
    Ok(IntegralResult { value, n: q.n, segments, error_estimate: (value - coarse).norm_e() })
}

/// `∫_γ dζ Ψ(ζ)` at resolution `q.n`.
pub fn integrate_right(curve: &Curve, g: &GenericMap, gen: &GeneratorTriple, q: &QuadratureSpec) -> Result<IntegralResult> {
    integrate(curve, g, gen, q, Side::Right)
}

/// `∫_γ Ψ(ζ) dζ` at resolution `q.n`.
pub fn integrate_left(curve: &Curve, g: &GenericMap, gen: &GeneratorTriple, q: &QuadratureSpec) -> Result<IntegralResult> {
    integrate(curve, g, gen, q, Side::Left)
}

/// Either integral, computed through the componentwise formula.
pub fn integrate_componentwise_oracle(
    curve: &Curve,
    g: &GenericMap,
    gen: &GeneratorTriple,
    q: &QuadratureSpec,
    side: Side,
) -> Result<IntegralResult> {
    q.validate()?;
    let run = |n: usize| {
        let pts = curve.points(n);
        oracle_points(&pts, g, gen, q.rule, side)
            .map(|v| (v, pts.len() - 1))
            .map_err(|e| locate(&oriented_params(curve, n), e))
    };
    let (value, segments) = run(q.n)?;
    let (coarse, _) = run((q.n / 2).max(1))?;
    Ok(IntegralResult { value, n: q.n, segments, error_estimate: (value - coarse).norm_e() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementRow {
    pub n: usize,
    pub segments: usize,
    pub value: Quaternion,
    pub norm: f64,
    /// `norm_e` of the change from the previous row; absent on the first row.
    pub change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub rows: Vec<RefinementRow>,
    pub converged: bool,
}

impl Refinement {
    pub fn last(&self) -> &RefinementRow {
        self.rows.last().expect("refinement has at least one row")
    }

    pub fn result(&self) -> IntegralResult {
        let last = self.last();
        IntegralResult {
            value: last.value,
            n: last.n,
            segments: last.segments,
            error_estimate: last.change.unwrap_or(f64::INFINITY),
        }
    }
}

/// Walks `schedule` until two successive values differ by less than `tol`
/// (in `norm_e`) or the schedule is exhausted. Non-convergence is reported
/// through [`Refinement::converged`].
pub fn refine_until(
    curve: &Curve,
    g: &GenericMap,
    gen: &GeneratorTriple,
    side: Side,
    rule: Rule,
    tol: f64,
    schedule: &[usize],
) -> Result<Refinement> {
    if !(tol > 0.0) {
        return Err(Error::InvalidQuadrature(format!("tolerance {tol} must be positive")));
    }
    QuadratureSpec { rule, n: schedule.first().copied().unwrap_or(0), schedule: schedule.to_vec() }.validate()?;
    let mut rows: Vec<RefinementRow> = Vec::new();
    for &n in schedule {
        let (value, segments) = integrate_at(curve, g, gen, rule, side, n)?;
        let change = rows.last().map(|r| (value - r.value).norm_e());
        rows.push(RefinementRow { n, segments, value, norm: value.norm_e(), change });
        if change.is_some_and(|c| c < tol) {
            return Ok(Refinement { rows, converged: true });
        }
    }
    Ok(Refinement { rows, converged: false })
}

/// Full table over `schedule`, without early stopping.
pub fn refinement_table(
    curve: &Curve,
    g: &GenericMap,
    gen: &GeneratorTriple,
    side: Side,
    rule: Rule,
    schedule: &[usize],
) -> Result<Vec<RefinementRow>> {
    let mut rows: Vec<RefinementRow> = Vec::new();
    for &n in schedule {
        let (value, segments) = integrate_at(curve, g, gen, rule, side, n)?;
        let change = rows.last().map(|r| (value - r.value).norm_e());
        rows.push(RefinementRow { n, segments, value, norm: value.norm_e(), change });
    }
    Ok(rows)
}

/// Least-squares slope of `log(err)` against `log(n)`, negated so that
/// `err ~ n^{-p}` gives `p`. Needs at least two positive errors.
pub fn convergence_order(ns: &[usize], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0 && e.is_finite())
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(-sxy / sxx)
}
