//! Scenario files: TOML documents describing generators, maps, curves,
//! homotopies and the suites to run over them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::curve::{Curve, WobblyLoop};
use crate::homotopy::Homotopy;
use crate::integrals::Rule;
use crate::maps::{Factor, GenericMap, HolomorphicFn, MonogenicMap, Side, Term};
use crate::space::{GeneratorTriple, PointE3};

pub const SCENARIO_SCHEMA: &str = "biquat-scenario/1";

/// Homotopy parameters sampled on the way to the boundary.
pub const DEFAULT_S_GRID: [f64; 5] = [0.5, 0.25, 0.1, 0.05, 0.01];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error at `{path}`: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("generator: {0}")]
    Generator(crate::error::Error),
    #[error("{field}: {source}")]
    Geometry {
        field: String,
        #[source]
        source: crate::error::Error,
    },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), message: message.into() }
}

type C2 = [f64; 2];
type P3 = [f64; 3];

fn cx(v: C2) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn pt(v: P3) -> PointE3 {
    PointE3::new(v[0], v[1], v[2])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub generator: GeneratorDef,
    #[serde(default)]
    pub quadrature: QuadratureDef,
    #[serde(default)]
    pub tolerances: ToleranceDef,
    #[serde(default)]
    pub maps: BTreeMap<String, MapDef>,
    #[serde(default)]
    pub curves: BTreeMap<String, CurveDef>,
    #[serde(default)]
    pub homotopies: BTreeMap<String, HomotopyDef>,
    #[serde(default)]
    pub suite: Vec<SuiteDef>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDef {
    pub a1: C2,
    pub a2: C2,
    pub b1: C2,
    pub b2: C2,
}

impl Default for GeneratorDef {
    fn default() -> Self {
        let g = GeneratorTriple::default();
        GeneratorDef {
            a1: [g.a1.re, g.a1.im],
            a2: [g.a2.re, g.a2.im],
            b1: [g.b1.re, g.b1.im],
            b2: [g.b2.re, g.b2.im],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureDef {
    #[serde(default = "default_rule")]
    pub rule: Rule,
    #[serde(default = "default_refinements")]
    pub refinements: Vec<usize>,
    #[serde(default = "default_mes_resolution")]
    pub mes_resolution: usize,
}

fn default_rule() -> Rule {
    Rule::Trapezoid
}
fn default_refinements() -> Vec<usize> {
    (5..=18).map(|k| 1usize << k).collect()
}
fn default_mes_resolution() -> usize {
    4096
}

impl Default for QuadratureDef {
    fn default() -> Self {
        QuadratureDef { rule: default_rule(), refinements: default_refinements(), mes_resolution: default_mes_resolution() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceDef {
    #[serde(default = "default_theorem_tol")]
    pub theorem: f64,
    #[serde(default = "default_oracle_tol")]
    pub oracle: f64,
    #[serde(default = "default_slope_window")]
    pub residual_slope: [f64; 2],
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default = "default_cancellation")]
    pub cancellation: f64,
    #[serde(default = "default_defect")]
    pub gateaux_defect: f64,
}

fn default_theorem_tol() -> f64 {
    1e-8
}
fn default_oracle_tol() -> f64 {
    1e-13
}
fn default_slope_window() -> [f64; 2] {
    [0.9, 1.1]
}
fn default_noise() -> f64 {
    1e-12
}
fn default_cancellation() -> f64 {
    1e-10
}
fn default_defect() -> f64 {
    1e-4
}

impl Default for ToleranceDef {
    fn default() -> Self {
        ToleranceDef {
            theorem: default_theorem_tol(),
            oracle: default_oracle_tol(),
            residual_slope: default_slope_window(),
            noise: default_noise(),
            cancellation: default_cancellation(),
            gateaux_defect: default_defect(),
        }
    }
}

/// A holomorphic component, e.g. `{ power = 2 }`, `{ poly = [[0, 0], [1, 0]] }`,
/// `{ exp = { scale = [1, 0], rate = [0, 1] } }`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FnDef {
    Zero(bool),
    Power(usize),
    Poly(Vec<C2>),
    Exp { scale: C2, rate: C2 },
    Rational { num: Vec<C2>, den: Vec<C2>, poles: Vec<C2> },
}

impl FnDef {
    fn build(&self) -> HolomorphicFn {
        let poly = |v: &[C2]| v.iter().copied().map(cx).collect::<Vec<_>>();
        match self {
            FnDef::Zero(_) => HolomorphicFn::zero(),
            FnDef::Power(n) => HolomorphicFn::power(*n),
            FnDef::Poly(c) => HolomorphicFn::Polynomial(poly(c)),
            FnDef::Exp { scale, rate } => HolomorphicFn::exp(cx(*scale), cx(*rate)),
            FnDef::Rational { num, den, poles } => HolomorphicFn::Rational { num: poly(num), den: poly(den), poles: poly(poles) },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDef {
    /// One-based e-basis index.
    pub basis: usize,
    #[serde(default = "unit_coef")]
    pub coef: C2,
    pub factor: Factor,
    #[serde(default = "one_u32")]
    pub power: u32,
}

fn unit_coef() -> C2 {
    [1.0, 0.0]
}
fn one_u32() -> u32 {
    1
}

/// Either a G-monogenic map (`side` plus `scalar` or `f1..f4`) or a generic
/// map given by `terms`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDef {
    pub side: Option<Side>,
    pub scalar: Option<FnDef>,
    pub f1: Option<FnDef>,
    pub f2: Option<FnDef>,
    pub f3: Option<FnDef>,
    pub f4: Option<FnDef>,
    pub terms: Option<Vec<TermDef>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveDef {
    Segment { from: P3, to: P3 },
    Polyline { vertices: Vec<P3>, #[serde(default)] closed: bool },
    Ellipse { center: P3, u: P3, v: P3 },
    Circle { center: P3, radius: f64 },
    Arc { center: P3, u: P3, v: P3, from: f64, to: f64 },
    Wobbly {
        center: P3,
        u: P3,
        v: P3,
        w: P3,
        radius: f64,
        amplitude: f64,
        lobes: u32,
        #[serde(default)]
        lift: f64,
        #[serde(default = "one_u32")]
        lift_frequency: u32,
    },
    Concat { parts: Vec<String> },
    Reversed { of: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HomotopyDef {
    Radial { boundary: String, target: P3 },
    Twisted { boundary: String, target: P3, turns: f64 },
    Lifted { boundary: String, target: P3, lift: P3 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Theorem1,
    Theorem2,
    Theorem3,
    Proof,
}

/// Expected or observed outcome of a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteDef {
    pub id: String,
    pub kind: SuiteKind,
    pub map: Option<String>,
    #[serde(default)]
    pub maps: Vec<String>,
    pub curve: Option<String>,
    #[serde(default)]
    pub curves: Vec<String>,
    pub homotopy: Option<String>,
    #[serde(default)]
    pub homotopies: Vec<String>,
    /// Declares the curve contractible inside the map's domain (not verified).
    #[serde(default)]
    pub homotopic_to_point: Option<bool>,
    #[serde(default)]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub rho: Vec<f64>,
    pub resolution: Option<usize>,
    pub transversal_segments: Option<usize>,
    #[serde(default = "default_expect")]
    pub expect: Verdict,
}

fn default_expect() -> Verdict {
    Verdict::Pass
}

/// A map ready for evaluation; `monogenic` is kept when the map was given by
/// holomorphic components.
#[derive(Clone, Debug)]
pub struct ResolvedMap {
    pub name: String,
    pub generic: GenericMap,
    pub monogenic: Option<MonogenicMap>,
}

impl ResolvedMap {
    /// Side the map declares, right for generic maps.
    pub fn side(&self) -> Side {
        self.monogenic.as_ref().map_or(Side::Right, |m| m.side)
    }
}

/// One runnable suite instance after expanding `maps`/`curves`/`homotopies`.
#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub id: String,
    pub kind: SuiteKind,
    pub map: ResolvedMap,
    pub curve: Option<(String, Curve)>,
    pub homotopy: Option<(String, Homotopy)>,
    pub s_grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub resolution: usize,
    pub transversal_segments: usize,
    pub expect: Verdict,
    /// Position in the expanded suite list; used to derive per-case seeds.
    pub ordinal: usize,
}

impl SuiteCase {
    /// Selection group for `--suite`: entries not expected to pass are
    /// negative controls.
    pub fn group(&self) -> &'static str {
        if self.expect != Verdict::Pass {
            return "neg";
        }
        match self.kind {
            SuiteKind::Theorem1 => "t1",
            SuiteKind::Theorem2 => "t2",
            SuiteKind::Theorem3 => "t3",
            SuiteKind::Proof => "proof",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tolerances {
    pub theorem: f64,
    pub oracle: f64,
    pub residual_slope: [f64; 2],
    pub noise: f64,
    pub cancellation: f64,
    pub gateaux_defect: f64,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub gen: GeneratorTriple,
    pub rule: Rule,
    pub refinements: Vec<usize>,
    pub mes_resolution: usize,
    pub tolerances: Tolerances,
    pub cases: Vec<SuiteCase>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile = serde_path_to_error::deserialize(toml::Deserializer::new(text))
            .map_err(|e| ScenarioError::Parse { path: e.path().to_string(), source: e.into_inner() })?;
        Scenario::from_file(file)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
        if file.schema != SCENARIO_SCHEMA {
            return Err(invalid("schema", format!("expected \"{SCENARIO_SCHEMA}\", found \"{}\"", file.schema)));
        }
        let g = &file.generator;
        let gen = GeneratorTriple::new(cx(g.a1), cx(g.a2), cx(g.b1), cx(g.b2))
            .validated()
            .map_err(ScenarioError::Generator)?;

        let q = &file.quadrature;
        crate::integrals::QuadratureSpec { rule: q.rule, n: q.refinements.first().copied().unwrap_or(0), schedule: q.refinements.clone() }
            .validate()
            .map_err(|e| invalid("quadrature.refinements", e.to_string()))?;
        if q.mes_resolution < 1 {
            return Err(invalid("quadrature.mes_resolution", "must be at least 1"));
        }

        let t = &file.tolerances;
        for (name, v) in [
            ("theorem", t.theorem),
            ("oracle", t.oracle),
            ("noise", t.noise),
            ("cancellation", t.cancellation),
            ("gateaux_defect", t.gateaux_defect),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("tolerances.{name}"), "must be positive and finite"));
            }
        }

        let mut maps = BTreeMap::new();
        for (name, def) in &file.maps {
            maps.insert(name.clone(), build_map(name, def, gen)?);
        }
        let mut curves = BTreeMap::new();
        for name in file.curves.keys() {
            let c = build_curve(name, &file.curves, 0)?;
            curves.insert(name.clone(), c);
        }
        let mut homotopies = BTreeMap::new();
        for (name, def) in &file.homotopies {
            homotopies.insert(name.clone(), build_homotopy(name, def, &curves)?);
        }

        let mut cases = Vec::new();
        for (i, s) in file.suite.iter().enumerate() {
            expand_suite(i, s, &file, &maps, &curves, &homotopies, &mut cases)?;
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &cases {
            if !seen.insert(c.id.clone()) {
                return Err(invalid(format!("suite.{}", c.id), "duplicate suite id"));
            }
        }

        Ok(Scenario {
            name: file.name,
            seed: file.seed,
            gen,
            rule: q.rule,
            refinements: q.refinements.clone(),
            mes_resolution: q.mes_resolution,
            tolerances: Tolerances {
                theorem: t.theorem,
                oracle: t.oracle,
                residual_slope: t.residual_slope,
                noise: t.noise,
                cancellation: t.cancellation,
                gateaux_defect: t.gateaux_defect,
            },
            cases,
        })
    }
}

fn build_map(name: &str, def: &MapDef, gen: GeneratorTriple) -> Result<ResolvedMap, ScenarioError> {
    let field = format!("maps.{name}");
    let has_f = def.scalar.is_some() || def.f1.is_some() || def.f2.is_some() || def.f3.is_some() || def.f4.is_some();
    match (&def.terms, has_f) {
        (Some(_), true) => Err(invalid(field, "give either `terms` or holomorphic components, not both")),
        (Some(terms), false) => {
            if def.side.is_some() {
                return Err(invalid(field, "`side` applies only to monogenic maps"));
            }
            let mut built = Vec::with_capacity(terms.len());
            for (j, t) in terms.iter().enumerate() {
                if !(1..=4).contains(&t.basis) {
                    return Err(invalid(format!("{field}.terms[{j}].basis"), "must be 1, 2, 3 or 4"));
                }
                built.push(Term { basis: t.basis - 1, coef: cx(t.coef), factor: t.factor, power: t.power });
            }
            Ok(ResolvedMap { name: name.into(), generic: GenericMap::from_terms(built, gen).with_label(name), monogenic: None })
        }
        (None, false) => Err(invalid(field, "map has neither `terms` nor holomorphic components")),
        (None, true) => {
            let side = def.side.ok_or_else(|| invalid(format!("{field}.side"), "missing (\"right\" or \"left\")"))?;
            if def.scalar.is_some() && (def.f1.is_some() || def.f2.is_some()) {
                return Err(invalid(field, "`scalar` already sets f1 and f2"));
            }
            let get = |f: &Option<FnDef>| f.as_ref().map_or_else(HolomorphicFn::zero, FnDef::build);
            let (f1, f2) = match &def.scalar {
                Some(s) => (s.build(), s.build()),
                None => (get(&def.f1), get(&def.f2)),
            };
            let m = MonogenicMap::new(side, [f1, f2, get(&def.f3), get(&def.f4)], gen);
            Ok(ResolvedMap { name: name.into(), generic: m.to_generic().with_label(name), monogenic: Some(m) })
        }
    }
}

fn build_curve(name: &str, defs: &BTreeMap<String, CurveDef>, depth: usize) -> Result<Curve, ScenarioError> {
    let field = format!("curves.{name}");
    if depth > 16 {
        return Err(invalid(field, "curve references nest too deeply (cycle?)"));
    }
    let def = defs.get(name).ok_or_else(|| invalid(field.clone(), "unknown curve"))?;
    let geo = |e| ScenarioError::Geometry { field: field.clone(), source: e };
    Ok(match def {
        CurveDef::Segment { from, to } => Curve::segment(pt(*from), pt(*to)),
        CurveDef::Polyline { vertices, closed } => Curve::polyline(vertices.iter().copied().map(pt).collect(), *closed).map_err(geo)?,
        CurveDef::Ellipse { center, u, v } => Curve::ellipse(pt(*center), pt(*u), pt(*v)),
        CurveDef::Circle { center, radius } => Curve::circle_xy(pt(*center), *radius),
        CurveDef::Arc { center, u, v, from, to } => Curve::arc(pt(*center), pt(*u), pt(*v), *from, *to),
        CurveDef::Wobbly { center, u, v, w, radius, amplitude, lobes, lift, lift_frequency } => Curve::wobbly(WobblyLoop {
            center: pt(*center),
            u: pt(*u),
            v: pt(*v),
            w: pt(*w),
            radius: *radius,
            amplitude: *amplitude,
            lobes: *lobes,
            lift: *lift,
            lift_frequency: *lift_frequency,
        }),
        CurveDef::Concat { parts } => {
            let built = parts.iter().map(|p| build_curve(p, defs, depth + 1)).collect::<Result<Vec<_>, _>>()?;
            Curve::concat(built).map_err(geo)?
        }
        CurveDef::Reversed { of } => build_curve(of, defs, depth + 1)?.reversed(),
    })
}

fn build_homotopy(name: &str, def: &HomotopyDef, curves: &BTreeMap<String, Curve>) -> Result<Homotopy, ScenarioError> {
    let field = format!("homotopies.{name}");
    let lookup = |b: &String| curves.get(b).cloned().ok_or_else(|| invalid(format!("{field}.boundary"), format!("unknown curve \"{b}\"")));
    let geo = |e| ScenarioError::Geometry { field: field.clone(), source: e };
    match def {
        HomotopyDef::Radial { boundary, target } => Homotopy::radial(lookup(boundary)?, pt(*target)).map_err(geo),
        HomotopyDef::Twisted { boundary, target, turns } => Homotopy::twisted(lookup(boundary)?, pt(*target), *turns).map_err(geo),
        HomotopyDef::Lifted { boundary, target, lift } => Homotopy::lifted(lookup(boundary)?, pt(*target), pt(*lift)).map_err(geo),
    }
}

fn names(single: &Option<String>, many: &[String]) -> Vec<String> {
    single.iter().cloned().chain(many.iter().cloned()).collect()
}

fn expand_suite(
    index: usize,
    s: &SuiteDef,
    file: &ScenarioFile,
    maps: &BTreeMap<String, ResolvedMap>,
    curves: &BTreeMap<String, Curve>,
    homotopies: &BTreeMap<String, Homotopy>,
    out: &mut Vec<SuiteCase>,
) -> Result<(), ScenarioError> {
    let field = format!("suite[{index}] ({})", s.id);
    let map_names = names(&s.map, &s.maps);
    if map_names.is_empty() {
        return Err(invalid(field, "no map given"));
    }
    let curve_names = names(&s.curve, &s.curves);
    let hom_names = names(&s.homotopy, &s.homotopies);
    let (geom_names, uses_curve) = match s.kind {
        SuiteKind::Theorem1 => {
            if curve_names.is_empty() {
                return Err(invalid(field, "theorem1 needs `curve` or `curves`"));
            }
            if s.homotopic_to_point != Some(true) {
                return Err(invalid(format!("{field}.homotopic_to_point"), "theorem1 requires the declaration `homotopic_to_point = true`"));
            }
            (curve_names, true)
        }
        _ => {
            if hom_names.is_empty() {
                return Err(invalid(field, "needs `homotopy` or `homotopies`"));
            }
            (hom_names, false)
        }
    };
    let s_grid = s.s_grid.clone().unwrap_or_else(|| DEFAULT_S_GRID.to_vec());
    if s_grid.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(invalid(format!("{field}.s_grid"), "values must lie in (0, 1)"));
    }
    if s.kind == SuiteKind::Proof && s.rho.is_empty() {
        return Err(invalid(format!("{field}.rho"), "proof suite needs at least one rho"));
    }
    let expanded = map_names.len() * geom_names.len() > 1;
    for m in &map_names {
        let map = maps.get(m).cloned().ok_or_else(|| invalid(format!("{field}.map"), format!("unknown map \"{m}\"")))?;
        for g in &geom_names {
            let (curve, homotopy) = if uses_curve {
                let c = curves.get(g).cloned().ok_or_else(|| invalid(format!("{field}.curve"), format!("unknown curve \"{g}\"")))?;
                if !c.is_closed() {
                    return Err(invalid(format!("{field}.curve"), format!("curve \"{g}\" is not closed")));
                }
                (Some((g.clone(), c)), None)
            } else {
                let h = homotopies
                    .get(g)
                    .cloned()
                    .ok_or_else(|| invalid(format!("{field}.homotopy"), format!("unknown homotopy \"{g}\"")))?;
                (None, Some((g.clone(), h)))
            };
            let id = if expanded { format!("{}/{}/{}", s.id, m, g) } else { s.id.clone() };
            let ordinal = out.len();
            out.push(SuiteCase {
                id,
                kind: s.kind,
                map: map.clone(),
                curve,
                homotopy,
                s_grid: s_grid.clone(),
                rho: s.rho.clone(),
                resolution: s.resolution.unwrap_or(file.quadrature.mes_resolution),
                transversal_segments: s.transversal_segments.unwrap_or(64),
                expect: s.expect,
                ordinal,
            });
        }
    }
    Ok(())
}
