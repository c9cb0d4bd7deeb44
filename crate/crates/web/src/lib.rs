//! Browser bindings. Every export takes and returns JSON text; failures come
//! back as `{"error": "..."}`.

use biquat::harness::suites::proof_case;
use biquat::harness::ResolvedMap;
use biquat::integrals::{integrate_points, oracle_points};
use biquat::{
    BasisChange, Curve, Factor, GeneratorTriple, GenericMap, Homotopy, HolomorphicFn, MonogenicMap, PointE3, Quaternion, Rule,
    Side, Term, WobblyLoop,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Ellipse { center: [f64; 3], u: [f64; 3], v: [f64; 3] },
    Square { half: f64, z: f64 },
    Wobbly { lobes: u32, amplitude: f64, lift: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapPreset {
    Zeta2,
    Expmix,
    Mixed,
    Conj,
}

#[derive(Debug, Deserialize)]
pub struct MultiplyRequest {
    pub a: [f64; 8],
    pub b: [f64; 8],
}

#[derive(Debug, Serialize)]
pub struct MultiplyResponse {
    pub ab: [f64; 8],
    pub ba: [f64; 8],
    /// `{1, I, J, K}` coefficients of `ab` as `[re, im]` pairs.
    pub ab_ijk: [[f64; 2]; 4],
    pub commutator_norm: f64,
}

#[derive(Debug, Deserialize)]
pub struct IntegrateRequest {
    pub curve: CurveSpec,
    pub map: MapPreset,
    pub side: Side,
    pub n: usize,
}

#[derive(Debug, Serialize)]
pub struct IntegrateResponse {
    pub value: [f64; 8],
    pub norm: f64,
    pub oracle_difference: f64,
    pub mes: f64,
    pub points: Vec<[f64; 3]>,
    /// The curve's image in the `ξ1` plane.
    pub xi1: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
pub struct ContractRequest {
    pub curve: CurveSpec,
    pub map: MapPreset,
    pub side: Side,
    pub target: [f64; 3],
    pub s: f64,
    pub rho: f64,
}

#[derive(Debug, Serialize)]
pub struct ContractResponse {
    pub boundary: Vec<[f64; 3]>,
    pub level: Vec<[f64; 3]>,
    pub transversals: Vec<Vec<[f64; 3]>>,
    pub loops: usize,
    pub loop_norms: Vec<f64>,
    pub cancellation: f64,
    pub estimate: f64,
    pub boundary_norm: f64,
    pub level_norm: f64,
}

const DRAW_POINTS: usize = 256;

fn p3(v: [f64; 3]) -> PointE3 {
    PointE3::new(v[0], v[1], v[2])
}

fn arr(p: &PointE3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

pub fn build_curve(spec: &CurveSpec) -> Result<Curve, String> {
    Ok(match *spec {
        CurveSpec::Ellipse { center, u, v } => Curve::ellipse(p3(center), p3(u), p3(v)),
        CurveSpec::Square { half, z } => {
            if !(half > 0.0) {
                return Err("square half-width must be positive".into());
            }
            let c = |x: f64, y: f64| PointE3::new(x * half, y * half, z);
            Curve::polyline(vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)], true).map_err(|e| e.to_string())?
        }
        CurveSpec::Wobbly { lobes, amplitude, lift } => Curve::wobbly(WobblyLoop {
            center: PointE3::ORIGIN,
            u: PointE3::new(1.0, 0.0, 0.0),
            v: PointE3::new(0.0, 1.0, 0.0),
            w: PointE3::new(0.0, 0.0, 1.0),
            radius: 1.0,
            amplitude,
            lobes,
            lift,
            lift_frequency: 2,
        }),
    })
}

pub fn build_map(preset: MapPreset, side: Side, gen: GeneratorTriple) -> ResolvedMap {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let monogenic = match preset {
        MapPreset::Zeta2 => Some(MonogenicMap::scalar(side, HolomorphicFn::power(2), gen)),
        MapPreset::Expmix => Some(MonogenicMap::new(
            side,
            [
                HolomorphicFn::exp(c(1.0, 0.0), c(1.0, 0.0)),
                HolomorphicFn::exp(c(0.5, 0.0), c(0.0, 1.0)),
                HolomorphicFn::exp(c(0.5, 0.0), c(-1.0, 0.0)),
                HolomorphicFn::power(2),
            ],
            gen,
        )),
        MapPreset::Mixed => Some(MonogenicMap::new(
            side,
            [
                HolomorphicFn::power(1),
                HolomorphicFn::Polynomial(vec![c(0.0, 0.0), c(0.0, 1.0)]),
                HolomorphicFn::Polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]),
                HolomorphicFn::power(2),
            ],
            gen,
        )),
        MapPreset::Conj => None,
    };
    let generic = match &monogenic {
        Some(m) => m.to_generic(),
        None => GenericMap::from_terms(vec![Term { basis: 0, coef: c(1.0, 0.0), factor: Factor::ConjXi1, power: 1 }], gen),
    };
    ResolvedMap { name: format!("{preset:?}").to_lowercase(), generic, monogenic }
}

pub fn multiply_impl(req: &MultiplyRequest) -> MultiplyResponse {
    let (a, b) = (Quaternion::from_reals(req.a), Quaternion::from_reals(req.b));
    let (ab, ba) = (a * b, b * a);
    let ijk = BasisChange::standard().to_ijk(&ab);
    MultiplyResponse {
        ab: ab.to_reals(),
        ba: ba.to_reals(),
        ab_ijk: ijk.0.map(|z| [z.re, z.im]),
        commutator_norm: (ab - ba).norm_e(),
    }
}

pub fn integrate_impl(req: &IntegrateRequest) -> Result<IntegrateResponse, String> {
    if !(2..=1 << 17).contains(&req.n) {
        return Err(format!("n = {} outside 2..=131072", req.n));
    }
    let gen = GeneratorTriple::default();
    let curve = build_curve(&req.curve)?;
    let map = build_map(req.map, req.side, gen);
    let pts = curve.points(req.n);
    let value = integrate_points(&pts, &map.generic, &gen, Rule::Trapezoid, req.side).map_err(|(_, e)| e.to_string())?;
    let oracle = oracle_points(&pts, &map.generic, &gen, Rule::Trapezoid, req.side).map_err(|(_, e)| e.to_string())?;
    let draw = curve.points(DRAW_POINTS);
    Ok(IntegrateResponse {
        value: value.to_reals(),
        norm: value.norm_e(),
        oracle_difference: (value - oracle).norm_e(),
        mes: biquat::curve::polyline_length(&pts),
        xi1: draw.iter().map(|p| gen.xi(p).0).map(|z| [z.re, z.im]).collect(),
        points: draw.iter().map(arr).collect(),
    })
}

pub fn contract_impl(req: &ContractRequest) -> Result<ContractResponse, String> {
    if !(req.s > 0.0 && req.s < 1.0) {
        return Err("s must lie in (0, 1)".into());
    }
    let gen = GeneratorTriple::default();
    let curve = build_curve(&req.curve)?;
    let h = Homotopy::radial(curve.clone(), p3(req.target)).map_err(|e| e.to_string())?;
    let map = build_map(req.map, req.side, gen);
    let case = proof_case(&h, &map, &gen, req.side, req.rho, req.s, 2048, 32)?;
    let sub = curve.subdivide_by_arclength(req.rho, 2048).map_err(|e| e.to_string())?;
    let transversals = sub
        .params
        .iter()
        .map(|&t| (0..=16).map(|j| arr(&h.eval(req.s * j as f64 / 16.0, t))).collect())
        .collect();
    let level = h.level_curve(req.s);
    let ev = |c: &Curve| {
        integrate_points(&c.points(2048), &map.generic, &gen, Rule::Trapezoid, req.side).map(|v| v.norm_e()).map_err(|(_, e)| e.to_string())
    };
    Ok(ContractResponse {
        boundary: curve.points(DRAW_POINTS).iter().map(arr).collect(),
        level: level.points(DRAW_POINTS).iter().map(arr).collect(),
        transversals,
        loops: case.loop_norms.len(),
        loop_norms: case.loop_norms,
        cancellation: case.cancellation,
        estimate: case.estimate,
        boundary_norm: ev(&curve)?,
        level_norm: ev(&level)?,
    })
}

fn respond<Req: for<'de> Deserialize<'de>, Resp: Serialize>(json: &str, f: impl FnOnce(&Req) -> Result<Resp, String>) -> String {
    let out = serde_json::from_str::<Req>(json).map_err(|e| format!("bad request: {e}")).and_then(|r| f(&r));
    match out {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

/// Product of two quaternions in both orders.
#[wasm_bindgen]
pub fn multiply(request: &str) -> String {
    respond(request, |r: &MultiplyRequest| Ok(multiply_impl(r)))
}

/// Closed-curve integral of a preset map, with the componentwise cross-check.
#[wasm_bindgen]
pub fn integrate(request: &str) -> String {
    respond(request, integrate_impl)
}

/// Radial contraction to `target`: level curve at `s`, transversals at the
/// arclength cuts and the loop decomposition.
#[wasm_bindgen]
pub fn contract(request: &str) -> String {
    respond(request, contract_impl)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse() -> CurveSpec {
        CurveSpec::Ellipse { center: [0.0, 0.0, 0.0], u: [1.0, 0.2, 0.0], v: [0.0, 0.7, 0.3] }
    }

    #[test]
    fn multiply_shows_noncommutativity() {
        let mut a = [0.0; 8];
        let mut b = [0.0; 8];
        a[4] = 1.0; // e3
        b[0] = 1.0; // e1
        let r = multiply_impl(&MultiplyRequest { a, b });
        assert_eq!(r.ab, [0.0; 8]);
        assert_eq!(r.ba, a);
        assert_eq!(r.commutator_norm, 1.0);
    }

    #[test]
    fn integrate_matches_oracle_and_vanishes_on_own_side() {
        let r = integrate_impl(&IntegrateRequest { curve: ellipse(), map: MapPreset::Mixed, side: Side::Right, n: 512 }).unwrap();
        assert!(r.norm < 1e-10, "{}", r.norm);
        assert!(r.oracle_difference < 1e-13);
        assert_eq!(r.points.len(), DRAW_POINTS + 1);
    }

    #[test]
    fn conj_map_does_not_vanish() {
        let r = integrate_impl(&IntegrateRequest { curve: ellipse(), map: MapPreset::Conj, side: Side::Right, n: 512 }).unwrap();
        assert!(r.norm > 0.5);
    }

    #[test]
    fn contract_reports_cancellation() {
        let req = ContractRequest {
            curve: CurveSpec::Square { half: 0.7, z: 0.0 },
            map: MapPreset::Expmix,
            side: Side::Left,
            target: [0.0, 0.0, 0.5],
            s: 0.25,
            rho: 0.8,
        };
        let r = contract_impl(&req).unwrap();
        assert!(r.cancellation < 1e-10);
        assert_eq!(r.loops, r.transversals.len());
        assert!(r.loops >= 2);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let ok = integrate(r#"{"curve":{"kind":"wobbly","lobes":3,"amplitude":0.2,"lift":0.1},"map":"zeta2","side":"left","n":2048}"#);
        let v: serde_json::Value = serde_json::from_str(&ok).unwrap();
        assert!(v["norm"].as_f64().unwrap() < 1e-4, "{ok}");
        let bad = integrate(r#"{"curve":{"kind":"blob"}}"#);
        assert!(bad.contains("error"));
        let out_of_range = contract(r#"{"curve":{"kind":"square","half":0.5,"z":0},"map":"zeta2","side":"right","target":[0,0,0.5],"s":1.5,"rho":0.5}"#);
        assert!(out_of_range.contains("s must lie"));
    }
}
