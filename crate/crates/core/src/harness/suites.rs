//! Suite runners. Each returns a [`SuiteResult`] holding the verdict, a typed
//! outcome and the report section.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::Section;
use super::scenario::{ResolvedMap, Scenario, SuiteCase, SuiteKind, Tolerances, Verdict};
use crate::curve::{merge_params, polyline_length, Curve};
use crate::error::Error;
use crate::homotopy::Homotopy;
use crate::integrals::{self, convergence_order, refine_until, refinement_table, RefinementRow, Rule};
use crate::maps::Side;
use crate::space::{GeneratorTriple, PointE3};
use crate::Quaternion;

/// Step used by the derivative-free Gâteaux defect.
pub const DEFECT_STEP: f64 = 1e-6;
/// Relative growth of `mes` between resolution `N/4` and `N` treated as
/// unsettled.
pub const MES_GROWTH_LIMIT: f64 = 1e-3;
/// Random directions added to `i2`, `i3` in each defect scan.
pub const RANDOM_DIRECTIONS: usize = 3;
/// Largest resolution used when fitting convergence orders.
pub const ORDER_WINDOW: usize = 4096;

/// Settings shared by every suite of a run.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub gen: GeneratorTriple,
    pub rule: Rule,
    pub refinements: Vec<usize>,
    pub mes_resolution: usize,
    pub tol: Tolerances,
    pub seed: u64,
}

impl RunSettings {
    pub fn from_scenario(s: &Scenario) -> Self {
        RunSettings {
            gen: s.gen,
            rule: s.rule,
            refinements: s.refinements.clone(),
            mes_resolution: s.mes_resolution,
            tol: s.tolerances.clone(),
            seed: s.seed,
        }
    }

    fn rng(&self, ordinal: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (ordinal as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Theorem1(Theorem1Outcome),
    Boundary(BoundaryOutcome),
    Proof(ProofOutcome),
    /// Evaluation failed before any result could be formed.
    Aborted,
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub id: String,
    pub kind: SuiteKind,
    pub expect: Verdict,
    pub verdict: Verdict,
    pub note: Option<String>,
    pub outcome: Outcome,
    pub section: Section,
}

impl SuiteResult {
    pub fn matched(&self) -> bool {
        self.verdict == self.expect
    }
}

fn kind_name(k: SuiteKind) -> &'static str {
    match k {
        SuiteKind::Theorem1 => "theorem1",
        SuiteKind::Theorem2 => "theorem2",
        SuiteKind::Theorem3 => "theorem3",
        SuiteKind::Proof => "proof",
    }
}

fn rule_name(r: Rule) -> &'static str {
    match r {
        Rule::LeftEndpoint => "left_endpoint",
        Rule::Trapezoid => "trapezoid",
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Right => "right",
        Side::Left => "left",
    }
}

fn quat(q: &Quaternion) -> Vec<f64> {
    q.to_reals().to_vec()
}

/// Random unit vectors, drawn uniformly from the cube and normalized.
pub fn random_directions(rng: &mut ChaCha8Rng, count: usize) -> Vec<PointE3> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = PointE3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = p.norm();
        if n > 1e-3 {
            out.push(p * (1.0 / n));
        }
    }
    out
}

/// Largest relative Gâteaux defect of `map` over `points` along `i2`, `i3`
/// and `dirs`. Errors carry the point that failed.
pub fn defect_scan(
    map: &ResolvedMap,
    gen: &GeneratorTriple,
    points: &[PointE3],
    dirs: &[PointE3],
    form: Side,
) -> Result<f64, String> {
    let mut worst = 0.0f64;
    let axes = [PointE3::new(0.0, 1.0, 0.0), PointE3::new(0.0, 0.0, 1.0)];
    for p in points {
        let scale = 1.0 + map.generic.eval(p).map_err(|e| format!("at {p:?}: {e}"))?.norm_e();
        for h in axes.iter().chain(dirs) {
            let d = map.generic.gateaux_defect(gen, p, h, DEFECT_STEP, form).map_err(|e| format!("at {p:?}: {e}"))?;
            worst = worst.max(d / scale);
        }
    }
    Ok(worst)
}

fn describe(e: &Error) -> String {
    e.to_string()
}

/// Result of a theorem-1 run on one closed curve.
#[derive(Clone, Debug)]
pub struct Theorem1Outcome {
    pub rows: Vec<RefinementRow>,
    pub converged: bool,
    pub final_norm: f64,
    /// Empirical order from the closed-curve norms that clear the noise floor.
    pub order: Option<f64>,
    /// Empirical order of the rule on the open half of the curve against the
    /// exact primitive, when the map has one and the errors clear the noise.
    pub open_arc_order: Option<f64>,
    pub open_arc_errors: Vec<(usize, f64)>,
    pub defect_max: Option<f64>,
}

pub fn run_theorem1(case: &SuiteCase, curve: &Curve, cfg: &RunSettings) -> SuiteResult {
    let map = &case.map;
    let side = Side::Right;
    let mut sec = header(case, cfg);
    sec.set("curve", case.curve.as_ref().map_or("", |c| c.0.as_str()));
    sec.set("side", side_name(side));
    sec.set("homotopic_to_point", true);

    let refinement = match refine_until(curve, &map.generic, &cfg.gen, side, cfg.rule, cfg.tol.theorem, &cfg.refinements) {
        Ok(r) => r,
        Err(e) => return aborted(case, sec, describe(&e)),
    };
    let final_norm = refinement.last().norm;

    let mut rng = cfg.rng(case.ordinal);
    let dirs = random_directions(&mut rng, RANDOM_DIRECTIONS);
    let probe = curve.points(16);
    let defect = defect_scan(map, &cfg.gen, &probe[..probe.len() - 1], &dirs, side).ok();

    let (open_arc_errors, open_arc_order) = match map.monogenic.as_ref().and_then(|m| m.primitive().map(|p| (m, p))) {
        Some((m, prim)) if m.side == Side::Right => open_arc_convergence(curve, map, &prim, cfg),
        _ => (Vec::new(), None),
    };

    let order = measured_order(refinement.rows.iter().map(|r| (r.n, r.norm)), 0.0);

    let verdict = if final_norm <= cfg.tol.theorem { Verdict::Pass } else { Verdict::Fail };
    let note = (verdict == Verdict::Fail).then(|| format!("final norm {final_norm:e} exceeds tolerance {:e}", cfg.tol.theorem));

    sec.set("final_n", refinement.last().n);
    sec.set("final_norm", final_norm);
    sec.set("value", quat(&refinement.last().value));
    sec.set("converged", refinement.converged);
    sec.set_opt("gateaux_defect_max", defect);
    sec.set("hypotheses", if defect.is_some_and(|d| d <= cfg.tol.gateaux_defect) { "ok" } else { "violated" });
    sec.set_opt("order", order);
    sec.set_opt("open_arc_order", open_arc_order);
    for r in &refinement.rows {
        sec.push_child("convergence", row_section(r));
    }
    for (n, err) in &open_arc_errors {
        let mut row = Section::new();
        row.set("n", *n).set("error", *err);
        sec.push_child("open_arc", row);
    }

    let outcome = Outcome::Theorem1(Theorem1Outcome {
        rows: refinement.rows.clone(),
        converged: refinement.converged,
        final_norm,
        order,
        open_arc_order,
        open_arc_errors,
        defect_max: defect,
    });
    finish(case, sec, verdict, note, outcome)
}

fn open_arc_convergence(
    curve: &Curve,
    map: &ResolvedMap,
    prim: &crate::MonogenicMap,
    cfg: &RunSettings,
) -> (Vec<(usize, f64)>, Option<f64>) {
    let arc = curve.sub_arc(0.0, 0.5);
    let exact = match (prim.eval(&arc.eval(1.0)), prim.eval(&arc.eval(0.0))) {
        (Ok(b), Ok(a)) => b - a,
        _ => return (Vec::new(), None),
    };
    let Ok(rows) = refinement_table(&arc, &map.generic, &cfg.gen, Side::Right, cfg.rule, &cfg.refinements) else {
        return (Vec::new(), None);
    };
    let errors: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, (r.value - exact).norm_e())).collect();
    let order = measured_order(errors.iter().copied(), exact.norm_e());
    (errors, order)
}

/// Order fitted to the errors above `1e4 ε (1 + scale)` on resolutions up to
/// [`ORDER_WINDOW`].
pub fn measured_order(errors: impl Iterator<Item = (usize, f64)>, scale: f64) -> Option<f64> {
    let floor = 1e4 * f64::EPSILON * (1.0 + scale);
    let (ns, es): (Vec<usize>, Vec<f64>) = errors.filter(|(n, e)| *n <= ORDER_WINDOW && *e > floor).unzip();
    convergence_order(&ns, &es)
}

fn row_section(r: &RefinementRow) -> Section {
    let mut row = Section::new();
    row.set("n", r.n).set("segments", r.segments).set("norm", r.norm);
    row.set_opt("change", r.change);
    row.set("value", quat(&r.value));
    row
}

/// One level curve `γ^s` of a boundary suite.
#[derive(Clone, Debug)]
pub struct LevelRow {
    pub s: f64,
    /// Resolution at which the level integral settled.
    pub n: usize,
    pub mes: f64,
    pub norm: f64,
    /// `‖∫γ^s − ∫γ‖`.
    pub diff: f64,
}

/// Result of a theorem-2 or theorem-3 run on a homotopy boundary.
#[derive(Clone, Debug)]
pub struct BoundaryOutcome {
    pub side: Side,
    pub rows: Vec<RefinementRow>,
    pub converged: bool,
    pub final_norm: f64,
    pub levels: Vec<LevelRow>,
    pub monotone: bool,
    pub degenerate_norm: f64,
    pub max_transversal_mes: f64,
    pub hypothesis_failures: Vec<String>,
    pub defect_max: Option<f64>,
}

pub fn run_boundary(case: &SuiteCase, h: &Homotopy, side: Side, cfg: &RunSettings) -> SuiteResult {
    let map = &case.map;
    let mut sec = header(case, cfg);
    sec.set("homotopy", case.homotopy.as_ref().map_or("", |c| c.0.as_str()));
    sec.set("side", side_name(side));
    let gamma = h.boundary();
    let n_mes = cfg.mes_resolution;
    let mut failures = Vec::new();

    // Hypotheses: rectifiable level curves and transversals, contraction,
    // monogenicity on the interior.
    let mut level_s = vec![0.0];
    level_s.extend(case.s_grid.iter().copied());
    level_s.push(1.0);
    for &s in &level_s {
        let lvl = h.level_curve(s);
        let (fine, coarse) = (polyline_length(&lvl.points(n_mes)), polyline_length(&lvl.points((n_mes / 4).max(1))));
        if !fine.is_finite() {
            failures.push(format!("mes(γ^{s}) is not finite"));
        } else if fine - coarse > MES_GROWTH_LIMIT * fine.max(1e-300) {
            failures.push(format!("mes(γ^{s}) still growing under refinement ({coarse:e} -> {fine:e})"));
        }
    }
    let mut max_transversal_mes = 0.0f64;
    for k in 0..16 {
        let t = k as f64 / 16.0;
        let tr = h.transversal_curve(t);
        let (fine, coarse) = (polyline_length(&tr.points(256)), polyline_length(&tr.points(64)));
        if !fine.is_finite() || fine - coarse > MES_GROWTH_LIMIT * fine.max(1e-300) {
            failures.push(format!("transversal at t = {t} not settled ({coarse:e} -> {fine:e})"));
        }
        max_transversal_mes = max_transversal_mes.max(fine);
    }
    if !h.is_contraction() {
        failures.push(format!("H(1, ·) is not constant (spread {:e})", h.endpoint_spread(64)));
    }
    let mut rng = cfg.rng(case.ordinal);
    let dirs = random_directions(&mut rng, RANDOM_DIRECTIONS);
    let interior: Vec<PointE3> =
        case.s_grid.iter().flat_map(|&s| (0..8).map(move |k| (s, k as f64 / 8.0))).map(|(s, t)| h.eval(s, t)).collect();
    let defect = match defect_scan(map, &cfg.gen, &interior, &dirs, side) {
        Ok(d) => {
            if d > cfg.tol.gateaux_defect {
                failures.push(format!("{}-Gâteaux defect {d:e} inside the homotopy image", side_name(side)));
            }
            Some(d)
        }
        Err(e) => {
            failures.push(format!("evaluation failed inside the homotopy image {e}"));
            None
        }
    };

    let refinement = match refine_until(gamma, &map.generic, &cfg.gen, side, cfg.rule, cfg.tol.theorem, &cfg.refinements) {
        Ok(r) => r,
        Err(e) => {
            sec.set("hypothesis_failures", failures);
            return aborted(case, sec, describe(&e));
        }
    };
    let final_n = refinement.last().n;
    let boundary_value = refinement.last().value;
    let final_norm = refinement.last().norm;

    let mut levels = Vec::new();
    for &s in &case.s_grid {
        let lvl = h.level_curve(s);
        match refine_until(&lvl, &map.generic, &cfg.gen, side, cfg.rule, cfg.tol.theorem, &cfg.refinements) {
            Ok(r) => levels.push(LevelRow {
                s,
                n: r.last().n,
                mes: polyline_length(&lvl.points(n_mes)),
                norm: r.last().norm,
                diff: (r.last().value - boundary_value).norm_e(),
            }),
            Err(e) => {
                sec.set("hypothesis_failures", failures);
                return aborted(case, sec, format!("level curve s = {s}: {e}"));
            }
        }
    }
    let degenerate_norm = match integrals::integrate_points(&h.level_curve(1.0).points(final_n), &map.generic, &cfg.gen, cfg.rule, side) {
        Ok(v) => v.norm_e(),
        Err((_, e)) => {
            sec.set("hypothesis_failures", failures);
            return aborted(case, sec, format!("level curve s = 1: {e}"));
        }
    };

    let mut ordered = levels.clone();
    ordered.sort_by(|a, b| b.s.total_cmp(&a.s));
    let floor = cfg.tol.noise.max(cfg.tol.theorem);
    let monotone = ordered.windows(2).all(|w| w[1].diff <= w[0].diff + floor);

    let verdict = if final_norm <= cfg.tol.theorem && monotone { Verdict::Pass } else { Verdict::Fail };
    let note = match verdict {
        Verdict::Fail if final_norm > cfg.tol.theorem => Some(format!("final norm {final_norm:e} exceeds tolerance {:e}", cfg.tol.theorem)),
        Verdict::Fail => Some("level-curve differences are not monotone as s -> 0".to_string()),
        _ => None,
    };

    sec.set("final_n", final_n);
    sec.set("final_norm", final_norm);
    sec.set("value", quat(&boundary_value));
    sec.set("converged", refinement.converged);
    sec.set("monotone", monotone);
    sec.set("degenerate_norm", degenerate_norm);
    sec.set("max_transversal_mes", max_transversal_mes);
    sec.set_opt("gateaux_defect_max", defect);
    sec.set("hypotheses", if failures.is_empty() { "ok" } else { "violated" });
    sec.set("hypothesis_failures", failures.clone());
    for r in &refinement.rows {
        sec.push_child("convergence", row_section(r));
    }
    for l in &levels {
        let mut row = Section::new();
        row.set("s", l.s).set("n", l.n).set("mes", l.mes).set("norm", l.norm).set("diff", l.diff);
        sec.push_child("levels", row);
    }

    let outcome = Outcome::Boundary(BoundaryOutcome {
        side,
        rows: refinement.rows.clone(),
        converged: refinement.converged,
        final_norm,
        levels,
        monotone,
        degenerate_norm,
        max_transversal_mes,
        hypothesis_failures: failures,
        defect_max: defect,
    });
    finish(case, sec, verdict, note, outcome)
}

/// Ingredients of the decomposition at one `(ρ, s)`.
#[derive(Clone, Debug)]
pub struct ProofCase {
    pub rho: f64,
    pub s: f64,
    pub n: usize,
    pub mes_boundary: f64,
    pub mes_level: f64,
    pub max_transversal_mes: f64,
    pub loops_mes_sum: f64,
    pub loop_norms: Vec<f64>,
    /// `‖Σ_k ∮Υ_k − (∮γ − ∮γ^s)‖`.
    pub cancellation: f64,
    /// `c Σ_k Σ_j ‖Δp_j‖ ‖Ψ*_j − Ψ(ζ_{0,k})‖` summed over all loops.
    pub estimate: f64,
    /// The discrete per-loop bound `‖∮Υ_k dζ(Ψ − Ψ(ζ_{0,k}))‖ <= c Σ‖Δp‖‖Ψ* − Ψ(ζ_{0,k})‖` held on every loop.
    pub bound_holds: bool,
}

impl ProofCase {
    pub fn max_loop_norm(&self) -> f64 {
        self.loop_norms.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct ProofOutcome {
    pub side: Side,
    pub component_bound: f64,
    pub cases: Vec<ProofCase>,
    pub cancellation_ok: bool,
    pub count_ok: bool,
    pub monotone: bool,
}

/// Assembles `Υ_k` as one closed polyline: boundary arc forward, transversal
/// at `t_{k+1}` inward, level arc backward, transversal at `t_k` outward.
fn loop_points(
    boundary: &[PointE3],
    level: &[PointE3],
    transversals: &[Vec<PointE3>],
    (i0, i1): (usize, usize),
    (k0, k1): (usize, usize),
) -> Vec<PointE3> {
    let mut pts: Vec<PointE3> = boundary[i0..=i1].to_vec();
    pts.extend(transversals[k1].iter().skip(1));
    pts.extend(level[i0..=i1].iter().rev().skip(1));
    pts.extend(transversals[k0].iter().rev().skip(1));
    pts
}

fn nearest(grid: &[f64], t: f64) -> usize {
    match grid.binary_search_by(|p| p.total_cmp(&t)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= grid.len() => grid.len() - 1,
        Err(i) => {
            if t - grid[i - 1] <= grid[i] - t {
                i - 1
            } else {
                i
            }
        }
    }
}

/// Runs the decomposition for one `(ρ, s)` pair.
pub fn proof_case(
    h: &Homotopy,
    map: &ResolvedMap,
    gen: &GeneratorTriple,
    side: Side,
    rho: f64,
    s: f64,
    resolution: usize,
    transversal_segments: usize,
) -> Result<ProofCase, String> {
    let gamma = h.boundary();
    let sub = gamma.subdivide_by_arclength(rho, resolution).map_err(|e| describe(&e))?;
    let grid = merge_params(gamma.params(resolution), sub.params.clone());
    let boundary = gamma.points_at(&grid);
    let level: Vec<PointE3> = grid.iter().map(|&t| h.eval(s, t)).collect();
    let rule = Rule::Trapezoid;
    let ev = |pts: &[PointE3]| integrals::integrate_points(pts, &map.generic, gen, rule, side).map_err(|(_, e)| e.to_string());

    let mut cut_idx: Vec<usize> = sub.params.iter().map(|&t| nearest(&grid, t)).collect();
    cut_idx.push(grid.len() - 1);
    let transversals: Vec<Vec<PointE3>> = cut_idx
        .iter()
        .map(|&i| (0..=transversal_segments).map(|j| h.eval(s * j as f64 / transversal_segments as f64, grid[i])).collect())
        .collect();

    let c = gen.component_bound_constant().map_err(|e| describe(&e))?;
    let mut loop_norms = Vec::with_capacity(cut_idx.len() - 1);
    let mut total = Quaternion::ZERO;
    let mut estimate = 0.0;
    let mut loops_mes_sum = 0.0;
    let mut bound_holds = true;
    for k in 0..cut_idx.len() - 1 {
        let pts = loop_points(&boundary, &level, &transversals, (cut_idx[k], cut_idx[k + 1]), (k, k + 1));
        let v = ev(&pts)?;
        total += v;
        loop_norms.push(v.norm_e());
        loops_mes_sum += polyline_length(&pts);

        let anchor = map.generic.eval(&boundary[cut_idx[k]]).map_err(|e| e.to_string())?;
        let values: Vec<Quaternion> =
            pts.iter().map(|p| map.generic.eval(p)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let mut bound = 0.0;
        let mut shifted = Quaternion::ZERO;
        for j in 0..pts.len() - 1 {
            let psi = (values[j] + values[j + 1]) * 0.5 - anchor;
            let dz = gen.embed(&(pts[j + 1] - pts[j]));
            shifted += match side {
                Side::Right => dz * psi,
                Side::Left => psi * dz,
            };
            bound += pts[j].distance(&pts[j + 1]) * psi.norm_e();
        }
        if shifted.norm_e() > c * bound * (1.0 + 1e-12) + 1e-15 {
            bound_holds = false;
        }
        estimate += c * bound;
    }
    let full = ev(&boundary)? - ev(&level)?;
    let max_transversal_mes = transversals.iter().map(|t| polyline_length(t)).fold(0.0, f64::max);
    Ok(ProofCase {
        rho,
        s,
        n: sub.n(),
        mes_boundary: polyline_length(&boundary),
        mes_level: polyline_length(&level),
        max_transversal_mes,
        loops_mes_sum,
        loop_norms,
        cancellation: (total - full).norm_e(),
        estimate,
        bound_holds,
    })
}

pub fn run_proof(case: &SuiteCase, h: &Homotopy, cfg: &RunSettings) -> SuiteResult {
    let map = &case.map;
    let side = map.side();
    let mut sec = header(case, cfg);
    sec.set("homotopy", case.homotopy.as_ref().map_or("", |c| c.0.as_str()));
    sec.set("side", side_name(side));
    sec.set("proof_rule", rule_name(Rule::Trapezoid));
    let component_bound = match cfg.gen.component_bound_constant() {
        Ok(c) => c,
        Err(e) => return aborted(case, sec, describe(&e)),
    };
    let mut s_desc = case.s_grid.clone();
    s_desc.sort_by(|a, b| b.total_cmp(a));

    let mut cases = Vec::new();
    for &rho in &case.rho {
        for &s in &s_desc {
            match proof_case(h, map, &cfg.gen, side, rho, s, case.resolution, case.transversal_segments) {
                Ok(pc) => cases.push(pc),
                Err(e) => return aborted(case, sec, format!("rho = {rho}, s = {s}: {e}")),
            }
        }
    }
    let cancellation_ok = cases.iter().all(|c| c.cancellation <= cfg.tol.cancellation);
    let count_ok = cases.iter().all(|c| c.n >= 2 && c.n <= (c.mes_boundary / c.rho).floor() as usize + 1);
    let monotone = case.rho.iter().all(|&rho| {
        let maxes: Vec<f64> = cases.iter().filter(|c| c.rho == rho).map(ProofCase::max_loop_norm).collect();
        maxes.windows(2).all(|w| w[1] <= w[0] + cfg.tol.noise)
    });
    let bounds_ok = cases.iter().all(|c| c.bound_holds);

    let verdict = if cancellation_ok && count_ok && monotone && bounds_ok { Verdict::Pass } else { Verdict::Fail };
    let mut reasons = Vec::new();
    if !cancellation_ok {
        reasons.push("loop sum does not cancel to the boundary difference");
    }
    if !count_ok {
        reasons.push("subdivision count outside 2..=floor(mes / rho) + 1");
    }
    if !monotone {
        reasons.push("per-loop norms do not decrease as s -> 0");
    }
    if !bounds_ok {
        reasons.push("per-loop estimate violated");
    }
    let note = (!reasons.is_empty()).then(|| reasons.join("; "));

    sec.set("component_bound", component_bound);
    sec.set("cancellation_ok", cancellation_ok);
    sec.set("count_ok", count_ok);
    sec.set("monotone", monotone);
    sec.set("bounds_ok", bounds_ok);
    sec.set("max_cancellation", cases.iter().map(|c| c.cancellation).fold(0.0, f64::max));
    for c in &cases {
        let mut row = Section::new();
        row.set("rho", c.rho)
            .set("s", c.s)
            .set("n", c.n)
            .set("mes_boundary", c.mes_boundary)
            .set("mes_level", c.mes_level)
            .set("max_transversal_mes", c.max_transversal_mes)
            .set("loops_mes_sum", c.loops_mes_sum)
            .set("cancellation", c.cancellation)
            .set("estimate", c.estimate)
            .set("bound_holds", c.bound_holds)
            .set("max_loop_norm", c.max_loop_norm())
            .set("loop_norms", c.loop_norms.clone());
        sec.push_child("cases", row);
    }
    let outcome = Outcome::Proof(ProofOutcome { side, component_bound, cases, cancellation_ok, count_ok, monotone });
    finish(case, sec, verdict, note, outcome)
}

/// Dispatches on the suite kind.
pub fn run_case(case: &SuiteCase, cfg: &RunSettings) -> SuiteResult {
    match (case.kind, &case.curve, &case.homotopy) {
        (SuiteKind::Theorem1, Some((_, c)), _) => run_theorem1(case, c, cfg),
        (SuiteKind::Theorem2, _, Some((_, h))) => run_boundary(case, h, Side::Right, cfg),
        (SuiteKind::Theorem3, _, Some((_, h))) => run_boundary(case, h, Side::Left, cfg),
        (SuiteKind::Proof, _, Some((_, h))) => run_proof(case, h, cfg),
        _ => aborted(case, header(case, cfg), "suite is missing its curve or homotopy".into()),
    }
}

fn header(case: &SuiteCase, cfg: &RunSettings) -> Section {
    let mut sec = Section::new();
    sec.set("id", case.id.as_str());
    sec.set("kind", kind_name(case.kind));
    sec.set("map", case.map.name.as_str());
    sec.set("rule", rule_name(cfg.rule));
    sec.set("tol", cfg.tol.theorem);
    sec
}

fn aborted(case: &SuiteCase, sec: Section, why: String) -> SuiteResult {
    finish(case, sec, Verdict::Inconclusive, Some(why), Outcome::Aborted)
}

fn finish(case: &SuiteCase, mut body: Section, verdict: Verdict, note: Option<String>, outcome: Outcome) -> SuiteResult {
    let mut sec = Section::new();
    let (lead, rest): (Vec<_>, Vec<_>) = body.fields.drain(..).partition(|(k, _)| k == "id" || k == "kind");
    sec.fields = lead;
    sec.set("verdict", verdict.as_str());
    sec.set("expected", case.expect.as_str());
    sec.set("matched", verdict == case.expect);
    sec.set_opt("note", note.clone());
    sec.fields.extend(rest);
    sec.children = body.children;
    SuiteResult { id: case.id.clone(), kind: case.kind, expect: case.expect, verdict, note, outcome, section: sec }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::Scenario;

    fn scenario(rule: &str) -> Scenario {
        Scenario::parse(&format!(
            r#"
schema = "biquat-scenario/1"

[quadrature]
rule = "{rule}"
refinements = [32, 64, 128, 256, 512]

[maps.cube]
side = "right"
scalar = {{ power = 3 }}

[maps.cube_left]
side = "left"
scalar = {{ power = 3 }}

[curves.square]
kind = "polyline"
closed = true
vertices = [[-0.5, -0.5, 0.0], [0.5, -0.5, 0.1], [0.5, 0.5, 0.0], [-0.5, 0.5, -0.1]]

[homotopies.cap]
kind = "twisted"
boundary = "square"
target = [0.0, 0.0, 0.3]
turns = 0.2

[[suite]]
id = "t1"
kind = "theorem1"
map = "cube"
curve = "square"
homotopic_to_point = true

[[suite]]
id = "t3"
kind = "theorem3"
map = "cube_left"
homotopy = "cap"

[[suite]]
id = "proof"
kind = "proof"
map = "cube"
homotopy = "cap"
rho = [0.4]
resolution = 256
"#
        ))
        .unwrap()
    }

    fn t1(rule: &str) -> Theorem1Outcome {
        let s = scenario(rule);
        let cfg = RunSettings::from_scenario(&s);
        let case = &s.cases[0];
        match run_case(case, &cfg).outcome {
            Outcome::Theorem1(o) => o,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trapezoid_is_second_order_on_polylines() {
        let o = t1("trapezoid");
        let p = o.order.unwrap();
        assert!((1.8..=2.2).contains(&p), "{p}");
    }

    #[test]
    fn left_endpoint_is_first_order_on_open_arcs() {
        let o = t1("left_endpoint");
        let p = o.open_arc_order.unwrap();
        assert!((0.8..=1.2).contains(&p), "{p}");
    }

    #[test]
    fn left_suite_uses_left_integral() {
        let s = scenario("trapezoid");
        let cfg = RunSettings::from_scenario(&s);
        let r = run_case(&s.cases[1], &cfg);
        let Outcome::Boundary(o) = &r.outcome else { panic!("{:?}", r.note) };
        assert_eq!(o.side, Side::Left);
        assert!(o.hypothesis_failures.is_empty(), "{:?}", o.hypothesis_failures);
        assert_eq!(o.degenerate_norm, 0.0);
        assert_eq!(o.levels.len(), 5);
    }

    #[test]
    fn proof_loops_cancel_and_respect_the_estimate() {
        let s = scenario("trapezoid");
        let cfg = RunSettings::from_scenario(&s);
        let r = run_case(&s.cases[2], &cfg);
        let Outcome::Proof(o) = &r.outcome else { panic!("{:?}", r.note) };
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.note);
        for c in &o.cases {
            assert!(c.cancellation < 1e-12, "{}", c.cancellation);
            assert!(c.bound_holds);
            let tr_sum = c.loops_mes_sum - c.mes_boundary - c.mes_level;
            assert!(tr_sum > 0.0 && tr_sum <= 2.0 * (c.n + 1) as f64 * c.max_transversal_mes * (1.0 + 1e-12));
        }
    }

    #[test]
    fn loop_assembly_closes() {
        let b = [PointE3::new(0.0, 0.0, 0.0), PointE3::new(1.0, 0.0, 0.0), PointE3::new(2.0, 0.0, 0.0)];
        let l = [PointE3::new(0.0, 1.0, 0.0), PointE3::new(1.0, 1.0, 0.0), PointE3::new(2.0, 1.0, 0.0)];
        let tr = vec![vec![b[0], l[0]], vec![b[2], l[2]]];
        let pts = loop_points(&b, &l, &tr, (0, 2), (0, 1));
        assert_eq!(pts.first(), pts.last());
        assert_eq!(pts.len(), 7);
        assert_eq!(polyline_length(&pts), 6.0);
    }

    #[test]
    fn nearest_picks_closest_node() {
        let g = [0.0, 0.25, 0.5, 1.0];
        assert_eq!(nearest(&g, 0.3), 1);
        assert_eq!(nearest(&g, 0.5), 2);
        assert_eq!(nearest(&g, 0.9), 3);
        assert_eq!(nearest(&g, -1.0), 0);
    }

    #[test]
    fn random_directions_are_unit_and_seeded() {
        let a = random_directions(&mut ChaCha8Rng::seed_from_u64(5), 4);
        let b = random_directions(&mut ChaCha8Rng::seed_from_u64(5), 4);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
    }
}
