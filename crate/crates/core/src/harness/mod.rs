//! Scenario-driven verification: parse a scenario, run its suites and write a
//! deterministic report.

pub mod report;
pub mod scenario;
pub mod suites;

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

pub use report::{Report, Section, Value, REPORT_SCHEMA};
pub use scenario::{ResolvedMap, Scenario, ScenarioError, SuiteCase, SuiteKind, Tolerances, Verdict, SCENARIO_SCHEMA};
pub use suites::{Outcome, RunSettings, SuiteResult};

use crate::integrals::QuadratureSpec;

/// The scenario shipped with the crate.
pub const DEFAULT_SCENARIO: &str = include_str!("../../scenarios/default.toml");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SuiteFilter {
    #[default]
    All,
    T1,
    T2,
    T3,
    Proof,
    Neg,
}

impl SuiteFilter {
    pub fn admits(&self, case: &SuiteCase) -> bool {
        match self {
            SuiteFilter::All => true,
            f => f.as_str() == case.group(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteFilter::All => "all",
            SuiteFilter::T1 => "t1",
            SuiteFilter::T2 => "t2",
            SuiteFilter::T3 => "t3",
            SuiteFilter::Proof => "proof",
            SuiteFilter::Neg => "neg",
        }
    }
}

impl FromStr for SuiteFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "all" => SuiteFilter::All,
            "t1" => SuiteFilter::T1,
            "t2" => SuiteFilter::T2,
            "t3" => SuiteFilter::T3,
            "proof" => SuiteFilter::Proof,
            "neg" => SuiteFilter::Neg,
            other => return Err(format!("unknown suite group \"{other}\" (t1, t2, t3, proof, neg, all)")),
        })
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub suite: SuiteFilter,
    pub tol: Option<f64>,
    pub refinements: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl RunOptions {
    /// Applies the overrides, validating them like scenario fields.
    pub fn apply(&self, s: &mut Scenario) -> Result<(), ScenarioError> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(ScenarioError::Invalid { field: "--tol".into(), message: format!("{tol} must be positive and finite") });
            }
            s.tolerances.theorem = tol;
        }
        if let Some(r) = &self.refinements {
            QuadratureSpec::new(s.rule, r.first().copied().unwrap_or(0), r.clone())
                .map_err(|e| ScenarioError::Invalid { field: "--refinements".into(), message: e.to_string() })?;
            s.refinements = r.clone();
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub results: Vec<SuiteResult>,
    pub report: Report,
}

impl Run {
    /// 0 when every suite met its expectation, 2 when an unmet suite was
    /// inconclusive, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let unmet: Vec<&SuiteResult> = self.results.iter().filter(|r| !r.matched()).collect();
        if unmet.is_empty() {
            EXIT_OK
        } else if unmet.iter().any(|r| r.verdict == Verdict::Inconclusive) {
            EXIT_ERROR
        } else {
            EXIT_FAIL
        }
    }

    pub fn find(&self, id: &str) -> Option<&SuiteResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

fn timed(case: &SuiteCase, cfg: &RunSettings) -> (SuiteResult, f64) {
    let start = Instant::now();
    let r = suites::run_case(case, cfg);
    (r, start.elapsed().as_secs_f64() * 1e3)
}

/// Runs the selected suites of a validated scenario.
pub fn run_scenario(s: &Scenario, filter: SuiteFilter) -> Run {
    let cfg = RunSettings::from_scenario(s);
    let selected: Vec<&SuiteCase> = s.cases.iter().filter(|c| filter.admits(c)).collect();
    #[cfg(feature = "parallel")]
    let timed_results: Vec<(SuiteResult, f64)> = {
        use rayon::prelude::*;
        selected.par_iter().map(|c| timed(c, &cfg)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let timed_results: Vec<(SuiteResult, f64)> = selected.iter().map(|c| timed(c, &cfg)).collect();

    let (results, times): (Vec<SuiteResult>, Vec<f64>) = timed_results.into_iter().unzip();
    let count = |v: Verdict| results.iter().filter(|r| r.verdict == v).count();
    let ind = s.gen.check_independence();

    let mut header = Section::new();
    header
        .set("scenario", s.name.as_str())
        .set("seed", s.seed as usize)
        .set("selection", filter.as_str())
        .set("generator", vec![s.gen.a1.re, s.gen.a1.im, s.gen.a2.re, s.gen.a2.im, s.gen.b1.re, s.gen.b1.im, s.gen.b2.re, s.gen.b2.im])
        .set("sigma_min", ind.sigma_min)
        .set("component_bound", ind.sigma_max)
        .set("rule", match s.rule {
            crate::Rule::LeftEndpoint => "left_endpoint",
            crate::Rule::Trapezoid => "trapezoid",
        })
        .set("refinements", s.refinements.clone())
        .set("tol", s.tolerances.theorem)
        .set("tol_oracle", s.tolerances.oracle)
        .set("tol_cancellation", s.tolerances.cancellation)
        .set("noise", s.tolerances.noise)
        .set("suites", results.len())
        .set("passed", count(Verdict::Pass))
        .set("failed", count(Verdict::Fail))
        .set("inconclusive", count(Verdict::Inconclusive))
        .set("matched", results.iter().filter(|r| r.matched()).count());

    let report = Report {
        header,
        suites: results.iter().map(|r| r.section.clone()).collect(),
        timings_ms: results.iter().zip(&times).map(|(r, t)| (r.id.clone(), *t)).collect(),
    };
    Run { results, report }
}

/// Parses `text`, applies `opts` and runs.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<Run, ScenarioError> {
    let mut s = Scenario::parse(text)?;
    opts.apply(&mut s)?;
    Ok(run_scenario(&s, opts.suite))
}

/// Full command: reads the scenario at `path`, writes the report to `out`
/// (stdout when `None`), prints a summary line per suite to stderr and
/// returns the process exit code.
pub fn run_all(path: &Path, out: Option<&Path>, opts: &RunOptions) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_ERROR;
        }
    };
    let run = match run_text(&text, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_ERROR;
        }
    };
    for r in &run.results {
        let tag = if r.matched() { "ok" } else { "UNEXPECTED" };
        match &r.note {
            Some(n) => eprintln!("{:<12} {:<8} {}  ({n})", r.verdict.as_str(), tag, r.id),
            None => eprintln!("{:<12} {:<8} {}", r.verdict.as_str(), tag, r.id),
        }
    }
    let text = run.report.render(true);
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_ERROR;
            }
        }
        None => print!("{text}"),
    }
    run.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
schema = "biquat-scenario/1"
name = "unit"

[quadrature]
refinements = [32, 64, 128]

[maps.sq]
side = "right"
scalar = { power = 2 }

[maps.conj]
terms = [{ basis = 1, factor = "conj_xi1" }]

[curves.circle]
kind = "circle"
center = [0.0, 0.0, 0.0]
radius = 1.0

[[suite]]
id = "ok"
kind = "theorem1"
map = "sq"
curve = "circle"
homotopic_to_point = true

[[suite]]
id = "neg"
kind = "theorem1"
map = "conj"
curve = "circle"
homotopic_to_point = true
expect = "fail"
"#;

    #[test]
    fn expectations_drive_exit_code() {
        let run = run_text(TEXT, &RunOptions::default()).unwrap();
        assert_eq!(run.exit_code(), EXIT_OK);
        assert_eq!(run.find("neg").unwrap().verdict, Verdict::Fail);

        let flipped = run_text(&TEXT.replace("expect = \"fail\"", "expect = \"pass\""), &RunOptions::default()).unwrap();
        assert_eq!(flipped.exit_code(), EXIT_FAIL);

        let inconclusive = run_text(&TEXT.replace("expect = \"fail\"", "expect = \"inconclusive\""), &RunOptions::default()).unwrap();
        assert_eq!(inconclusive.exit_code(), EXIT_FAIL);
    }

    #[test]
    fn filter_selects_groups() {
        let neg = run_text(TEXT, &RunOptions { suite: SuiteFilter::Neg, ..Default::default() }).unwrap();
        assert_eq!(neg.results.len(), 1);
        assert_eq!(neg.results[0].id, "neg");
        let t1 = run_text(TEXT, &RunOptions { suite: SuiteFilter::T1, ..Default::default() }).unwrap();
        assert_eq!(t1.results.len(), 1);
        assert_eq!(t1.results[0].id, "ok");
        assert!(run_text(TEXT, &RunOptions { suite: SuiteFilter::Proof, ..Default::default() }).unwrap().results.is_empty());
    }

    #[test]
    fn filtering_keeps_per_suite_numbers() {
        let all = run_text(TEXT, &RunOptions::default()).unwrap();
        let neg = run_text(TEXT, &RunOptions { suite: SuiteFilter::Neg, ..Default::default() }).unwrap();
        assert_eq!(all.find("neg").unwrap().section, neg.results[0].section);
    }

    #[test]
    fn overrides_validate() {
        let mut s = Scenario::parse(TEXT).unwrap();
        assert!(RunOptions { tol: Some(0.0), ..Default::default() }.apply(&mut s).is_err());
        assert!(RunOptions { refinements: Some(vec![8, 8]), ..Default::default() }.apply(&mut s).is_err());
        RunOptions { tol: Some(1e-5), refinements: Some(vec![16, 32]), seed: Some(3), ..Default::default() }.apply(&mut s).unwrap();
        assert_eq!((s.tolerances.theorem, s.refinements.clone(), s.seed), (1e-5, vec![16, 32], 3));
    }

    #[test]
    fn suite_filter_parses() {
        assert_eq!("proof".parse::<SuiteFilter>().unwrap(), SuiteFilter::Proof);
        assert!("t4".parse::<SuiteFilter>().is_err());
    }

    #[test]
    fn default_scenario_is_valid() {
        let s = Scenario::parse(DEFAULT_SCENARIO).unwrap();
        assert!(s.cases.len() > 40);
        assert!(s.cases.iter().any(|c| c.group() == "neg"));
    }
}
