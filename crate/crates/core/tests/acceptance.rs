//! Acceptance gate: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use biquat::harness::{self, Outcome, RunOptions, SuiteFilter, Verdict};
use biquat::integrals::{self, integrate_points, oracle_points, QuadratureSpec};
use biquat::{BasisChange, Curve, GeneratorTriple, PointE3, Quaternion, Rule, Side};
use num_complex::Complex64;
use rand::Rng;

const ASSOC_TOL: f64 = 1e-12;
const BASIS_CHANGE_TOL: f64 = 1e-13;
const ORACLE_TOL: f64 = 1e-13;
const SLOPE_WINDOW: (f64, f64) = (0.9, 1.1);
const LEFT_RESIDUAL_FLOOR: f64 = 1e-3;
const THEOREM_TOL: f64 = 1e-8;
const TRAPEZOID_ORDER: (f64, f64) = (1.8, 2.2);
const CANCELLATION_TOL: f64 = 1e-10;

/// Brute-force value of `∮ dζ conj(ξ1) e1` over the unit circle, trapezoid,
/// n = 10⁵, computed in 40-digit arithmetic: the e1 coefficient.
const NEG_CONTROL_E1: (f64, f64) = (0.0, 6.2831853030454162537);
const NEG_CONTROL_N: usize = 100_000;
const NEG_CONTROL_REL_TOL: f64 = 1e-12;

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(filter: SuiteFilter) -> harness::Run {
    harness::run_text(harness::DEFAULT_SCENARIO, &RunOptions { suite: filter, ..Default::default() }).expect("default scenario is valid")
}

fn algebra_fidelity() -> Result<String, String> {
    let e = [Quaternion::e1(), Quaternion::e2(), Quaternion::e3(), Quaternion::e4()];
    let zero = Quaternion::ZERO;
    #[rustfmt::skip]
    let table = [
        [e[0], zero, e[2], zero],
        [zero, e[1], zero, e[3]],
        [zero, e[2], zero, e[0]],
        [e[3], zero, e[1], zero],
    ];
    for a in 0..4 {
        for b in 0..4 {
            ensure(e[a] * e[b] == table[a][b], || format!("e{} e{} = {}", a + 1, b + 1, e[a] * e[b]))?;
        }
    }
    let mut r = common::rng(1);
    let bc = BasisChange::standard();
    let (mut assoc, mut iso) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (p, q, s) = (common::quaternion(&mut r), common::quaternion(&mut r), common::quaternion(&mut r));
        assoc = assoc.max(((p * q) * s - p * (q * s)).norm_e());
        iso = iso.max((bc.to_ijk(&(p * q)) - bc.to_ijk(&p) * bc.to_ijk(&q)).norm());
    }
    ensure(assoc <= ASSOC_TOL, || format!("associativity defect {assoc:e}"))?;
    ensure(iso <= BASIS_CHANGE_TOL, || format!("basis-change defect {iso:e}"))?;
    Ok(format!("16/16 products exact, associativity {assoc:.1e}, basis change {iso:.1e}"))
}

fn oracle_equivalence() -> Result<String, String> {
    let gen = GeneratorTriple::default();
    let mut r = common::rng(2);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let curve = common::curve(&mut r);
        let map = if r.gen_bool(0.5) {
            common::generic_map(&mut r, gen)
        } else {
            let side = if r.gen_bool(0.5) { Side::Right } else { Side::Left };
            common::monogenic_map(&mut r, side, gen).to_generic()
        };
        let n = r.gen_range(2..=64);
        let rule = if r.gen_bool(0.5) { Rule::Trapezoid } else { Rule::LeftEndpoint };
        let pts = curve.points(n);
        for side in [Side::Right, Side::Left] {
            let a = integrate_points(&pts, &map, &gen, rule, side).map_err(|e| format!("instance {i}: {e:?}"))?;
            let b = oracle_points(&pts, &map, &gen, rule, side).map_err(|e| format!("instance {i}: {e:?}"))?;
            let d = (a - b).norm_e();
            worst = worst.max(d);
            ensure(d <= ORACLE_TOL, || format!("instance {i} ({side:?}): difference {d:e}"))?;
        }
    }
    Ok(format!("1000 instances x 2 sides, max difference {worst:.1e}"))
}

fn slope(eps: &[f64], res: &[f64]) -> f64 {
    let m = eps.len() as f64;
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = res.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn gateaux_definition() -> Result<String, String> {
    let gen = GeneratorTriple::default();
    let mut r = common::rng(3);
    let eps = [1e-2, 1e-3, 1e-4];
    let (mut lo, mut hi, mut left_min) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    let mut checks = 0usize;
    for m in 0..20 {
        let map = common::curved_right_map(&mut r, gen);
        for _ in 0..10 {
            let p = common::point(&mut r, 0.5);
            let mut dirs = vec![PointE3::new(1.0, 0.0, 0.0), PointE3::new(0.0, 1.0, 0.0), PointE3::new(0.0, 0.0, 1.0)];
            dirs.extend((0..10).map(|_| common::unit(&mut r)));
            for (j, h) in dirs.iter().enumerate() {
                let res: Vec<f64> = eps
                    .iter()
                    .map(|&e| map.gateaux_residual(&p, h, e, Side::Right))
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("map {m}: {e}"))?;
                let s = slope(&eps, &res);
                lo = lo.min(s);
                hi = hi.max(s);
                ensure(s >= SLOPE_WINDOW.0 && s <= SLOPE_WINDOW.1, || format!("map {m}, direction {j}: slope {s:.4} ({res:?})"))?;
                if j > 0 {
                    let left = map.gateaux_residual(&p, h, 1e-4, Side::Left).map_err(|e| e.to_string())?;
                    left_min = left_min.min(left);
                    ensure(left > LEFT_RESIDUAL_FLOOR, || format!("map {m}, direction {j}: left residual {left:e}"))?;
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} residual slopes in [{lo:.3}, {hi:.3}], min left residual on right maps {left_min:.2e}"))
}

fn theorem1() -> Result<String, String> {
    let run = run(SuiteFilter::T1);
    ensure(run.results.len() == 20, || format!("expected 20 theorem-1 suites, found {}", run.results.len()))?;
    let mut worst = 0.0f64;
    let mut orders = Vec::new();
    for res in &run.results {
        let Outcome::Theorem1(o) = &res.outcome else {
            return Err(format!("{}: {:?} ({:?})", res.id, res.verdict, res.note));
        };
        ensure(res.verdict == Verdict::Pass && o.final_norm <= THEOREM_TOL, || format!("{}: norm {:e}", res.id, o.final_norm))?;
        worst = worst.max(o.final_norm);
        for p in o.order.iter().chain(o.open_arc_order.iter()) {
            ensure(*p >= TRAPEZOID_ORDER.0 && *p <= TRAPEZOID_ORDER.1, || format!("{}: order {p:.4}", res.id))?;
            orders.push(*p);
        }
    }
    let (lo, hi) = orders.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(*p), b.max(*p)));
    Ok(format!("20/20 PASS, max norm {worst:.1e}, {} measured orders in [{lo:.3}, {hi:.3}]", orders.len()))
}

fn negative_control() -> Result<String, String> {
    let gen = GeneratorTriple::default();
    let circle = Curve::circle_xy(PointE3::ORIGIN, 1.0);
    let map = biquat::GenericMap::from_terms(
        vec![biquat::Term { basis: 0, coef: Complex64::new(1.0, 0.0), factor: biquat::Factor::ConjXi1, power: 1 }],
        gen,
    );
    let q = QuadratureSpec::new(Rule::Trapezoid, NEG_CONTROL_N, vec![NEG_CONTROL_N]).map_err(|e| e.to_string())?;
    let v = integrals::integrate_right(&circle, &map, &gen, &q).map_err(|e| e.to_string())?.value;
    let target = Quaternion::new(Complex64::new(NEG_CONTROL_E1.0, NEG_CONTROL_E1.1), Complex64::default(), Complex64::default(), Complex64::default());
    let rel = (v - target).norm_e() / target.norm_e();
    ensure(rel <= NEG_CONTROL_REL_TOL, || format!("frozen target mismatch: {v} (relative {rel:e})"))?;

    let run = run(SuiteFilter::Neg);
    let res = run.find("t1-conj").ok_or("t1-conj missing")?;
    let Outcome::Theorem1(o) = &res.outcome else {
        return Err(format!("t1-conj: {:?}", res.note));
    };
    let threshold = 0.1 * std::f64::consts::PI;
    ensure(res.verdict == Verdict::Fail && res.matched(), || format!("verdict {:?}", res.verdict))?;
    ensure(o.final_norm >= threshold, || format!("norm {:e} below {threshold:e}", o.final_norm))?;
    Ok(format!("frozen value matched to {rel:.1e}, refined norm {:.6} >= {threshold:.4}, verdict FAIL as expected", o.final_norm))
}

fn theorem2() -> Result<String, String> {
    let run = run(SuiteFilter::T2);
    let mut lines = Vec::new();
    for id in ["t2/zeta2/hemisphere", "t2/expmix/hemisphere", "t2/mixed_right/hemisphere"] {
        let res = run.find(id).ok_or(format!("{id} missing"))?;
        let Outcome::Boundary(o) = &res.outcome else {
            return Err(format!("{id}: {:?}", res.note));
        };
        ensure(res.verdict == Verdict::Pass && o.final_norm <= THEOREM_TOL, || format!("{id}: norm {:e}", o.final_norm))?;
        ensure(o.monotone, || format!("{id}: level differences not monotone"))?;
        let sup = o.levels.iter().map(|l| l.mes).fold(0.0, f64::max);
        ensure(sup.is_finite() && o.hypothesis_failures.is_empty(), || format!("{id}: {:?}", o.hypothesis_failures))?;
        lines.push(format!("{:.1e} (sup mes {sup:.3})", o.final_norm));
    }
    ensure(run.results.iter().all(|r| r.verdict == Verdict::Pass), || "a theorem-2 suite did not pass".into())?;
    Ok(format!("hemisphere norms [{}], monotone level differences, sup mes finite; {} suites PASS", lines.join(", "), run.results.len()))
}

fn theorem3() -> Result<String, String> {
    let run = run(SuiteFilter::T3);
    for res in &run.results {
        let Outcome::Boundary(o) = &res.outcome else {
            return Err(format!("{}: {:?}", res.id, res.note));
        };
        ensure(o.side == Side::Left, || format!("{}: not a left suite", res.id))?;
        ensure(res.verdict == Verdict::Pass && o.final_norm <= THEOREM_TOL && o.monotone, || format!("{}: {:?}", res.id, res.note))?;
    }
    let neg = harness::run_text(harness::DEFAULT_SCENARIO, &RunOptions { suite: SuiteFilter::Neg, ..Default::default() }).map_err(|e| e.to_string())?;
    let cross = neg.find("t3-cross").ok_or("t3-cross missing")?;
    let Outcome::Boundary(o) = &cross.outcome else {
        return Err(format!("t3-cross: {:?}", cross.note));
    };
    ensure(cross.verdict == Verdict::Fail, || format!("t3-cross verdict {:?}", cross.verdict))?;
    ensure(!o.hypothesis_failures.is_empty(), || "t3-cross: left-monogenicity violation not reported".into())?;
    Ok(format!("{} left suites PASS; right map fed to the left integral FAILs with norm {:.3}", run.results.len(), o.final_norm))
}

fn proof_decomposition() -> Result<String, String> {
    let run = run(SuiteFilter::Proof);
    let mut homotopies = 0;
    let mut rhos = std::collections::BTreeSet::new();
    let mut worst = 0.0f64;
    for id in ["proof/expmix/hemisphere", "proof/expmix/twist", "proof/expmix/lifted"] {
        let res = run.find(id).ok_or(format!("{id} missing"))?;
        let Outcome::Proof(o) = &res.outcome else {
            return Err(format!("{id}: {:?}", res.note));
        };
        ensure(res.verdict == Verdict::Pass && o.monotone, || format!("{id}: {:?}", res.note))?;
        for c in &o.cases {
            ensure(c.cancellation <= CANCELLATION_TOL, || format!("{id} rho {} s {}: {:e}", c.rho, c.s, c.cancellation))?;
            let cap = (c.mes_boundary / c.rho).floor() as usize + 1;
            ensure(c.n >= 2 && c.n <= cap, || format!("{id} rho {}: n = {} outside 2..={cap}", c.rho, c.n))?;
            worst = worst.max(c.cancellation);
            rhos.insert(c.rho.to_bits());
        }
        homotopies += 1;
    }
    ensure(rhos.len() >= 3, || "fewer than 3 rho values".into())?;
    Ok(format!("{homotopies} homotopies x {} rho, max cancellation defect {worst:.1e}, loop norms decrease as s -> 0", rhos.len()))
}

fn determinism() -> Result<String, String> {
    let a = run(SuiteFilter::All).report.payload();
    let b = run(SuiteFilter::All).report.payload();
    ensure(a == b, || "payloads differ".into())?;
    Ok(format!("two full runs, {} byte payloads identical", a.len()))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("algebra fidelity", algebra_fidelity),
        ("oracle equivalence", oracle_equivalence),
        ("Gateaux definition", gateaux_definition),
        ("theorem 1 on closed curves", theorem1),
        ("negative control", negative_control),
        ("theorem 2 boundary case", theorem2),
        ("theorem 3 left-side mirror", theorem3),
        ("proof decomposition", proof_decomposition),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
