//! Right- and left-G-monogenic mappings built from holomorphic components,
//! plus arbitrary (generic) mappings `Ψ = Σ (U_k + i V_k) e_k`.
//!
//! With `ξ1, ξ2` the e1/e2 coordinates of `ζ`, a right-G-monogenic map is
//! `F1(ξ1) e1 + F2(ξ2) e2 + F3(ξ1) e3 + F4(ξ2) e4`, and a left-G-monogenic map
//! swaps the arguments of the last two components:
//! `F1(ξ1) e1 + F2(ξ2) e2 + F3(ξ2) e3 + F4(ξ1) e4`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexScalar, Quaternion};
use crate::error::EvalError;
use crate::space::{GeneratorTriple, PointE3};

/// Evaluations closer than this to a declared pole (in ξ-space) fail.
pub const POLE_MARGIN: f64 = 1e-9;

/// Which side the increment multiplies the derivative on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `h Φ'(ζ)`; integrated as `∫ dζ Φ`.
    Right,
    /// `Φ'(ζ) h`; integrated as `∫ Φ dζ`.
    Left,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

/// A holomorphic function of one complex variable.
#[derive(Clone, Debug, PartialEq)]
pub enum HolomorphicFn {
    /// Coefficients in ascending degree.
    Polynomial(Vec<Complex64>),
    /// `scale · exp(rate · w)`.
    Exponential { scale: Complex64, rate: Complex64 },
    /// `num(w) / den(w)` with the zeros of `den` listed in `poles`.
    Rational { num: Vec<Complex64>, den: Vec<Complex64>, poles: Vec<Complex64> },
}

fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::default(), |acc, &c| acc * w + c)
}

fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::default(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or_default() - b.get(k).copied().unwrap_or_default())
        .collect()
}

impl HolomorphicFn {
    pub fn zero() -> Self {
        HolomorphicFn::Polynomial(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        HolomorphicFn::Polynomial(vec![c])
    }

    pub fn identity() -> Self {
        HolomorphicFn::power(1)
    }

    /// `w ↦ wⁿ`.
    pub fn power(n: usize) -> Self {
        let mut c = vec![Complex64::default(); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        HolomorphicFn::Polynomial(c)
    }

    pub fn exp(scale: Complex64, rate: Complex64) -> Self {
        HolomorphicFn::Exponential { scale, rate }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            HolomorphicFn::Polynomial(c) => c.iter().all(|z| *z == Complex64::default()),
            HolomorphicFn::Exponential { scale, .. } => *scale == Complex64::default(),
            HolomorphicFn::Rational { num, .. } => num.iter().all(|z| *z == Complex64::default()),
        }
    }

    pub fn poles(&self) -> &[Complex64] {
        match self {
            HolomorphicFn::Rational { poles, .. } => poles,
            _ => &[],
        }
    }

    /// Nearest declared pole closer than [`POLE_MARGIN`], with its distance.
    pub fn pole_near(&self, w: Complex64) -> Option<(Complex64, f64)> {
        self.poles()
            .iter()
            .map(|&p| (p, (w - p).norm()))
            .filter(|&(_, d)| d < POLE_MARGIN)
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Value at `w` without the pole check.
    pub fn value(&self, w: Complex64) -> Complex64 {
        match self {
            HolomorphicFn::Polynomial(c) => horner(c, w),
            HolomorphicFn::Exponential { scale, rate } => scale * (rate * w).exp(),
            HolomorphicFn::Rational { num, den, .. } => horner(num, w) / horner(den, w),
        }
    }

    /// The derivative, in the same family.
    pub fn derivative(&self) -> HolomorphicFn {
        match self {
            HolomorphicFn::Polynomial(c) => HolomorphicFn::Polynomial(poly_derivative(c)),
            HolomorphicFn::Exponential { scale, rate } => HolomorphicFn::Exponential { scale: scale * rate, rate: *rate },
            HolomorphicFn::Rational { num, den, poles } => HolomorphicFn::Rational {
                num: poly_sub(&poly_mul(&poly_derivative(num), den), &poly_mul(num, &poly_derivative(den))),
                den: poly_mul(den, den),
                poles: poles.clone(),
            },
        }
    }

    /// A primitive, when one exists in closed form (polynomials, exponentials).
    pub fn antiderivative(&self) -> Option<HolomorphicFn> {
        match self {
            HolomorphicFn::Polynomial(c) => {
                let mut out = vec![Complex64::default()];
                out.extend(c.iter().enumerate().map(|(k, &z)| z / (k + 1) as f64));
                Some(HolomorphicFn::Polynomial(out))
            }
            HolomorphicFn::Exponential { scale, rate } => {
                if *rate == Complex64::default() {
                    Some(HolomorphicFn::Polynomial(vec![Complex64::default(), *scale]))
                } else {
                    Some(HolomorphicFn::Exponential { scale: scale / rate, rate: *rate })
                }
            }
            HolomorphicFn::Rational { .. } => None,
        }
    }
}

/// A G-monogenic mapping given by four holomorphic components.
#[derive(Clone, Debug, PartialEq)]
pub struct MonogenicMap {
    pub side: Side,
    pub f: [HolomorphicFn; 4],
    pub gen: GeneratorTriple,
}

impl MonogenicMap {
    pub fn new(side: Side, f: [HolomorphicFn; 4], gen: GeneratorTriple) -> Self {
        MonogenicMap { side, f, gen }
    }

    /// `F1 = F2 = g`, `F3 = F4 = 0`: the map `ζ ↦ g(ζ)` acting on the
    /// commutative span of `e1, e2`.
    pub fn scalar(side: Side, g: HolomorphicFn, gen: GeneratorTriple) -> Self {
        MonogenicMap::new(side, [g.clone(), g, HolomorphicFn::zero(), HolomorphicFn::zero()], gen)
    }

    /// `Φ(ζ) = ζ`.
    pub fn identity(side: Side, gen: GeneratorTriple) -> Self {
        MonogenicMap::scalar(side, HolomorphicFn::identity(), gen)
    }

    /// Same components, other side.
    pub fn with_side(&self, side: Side) -> Self {
        MonogenicMap { side, ..self.clone() }
    }

    /// Complex arguments fed to `F1..F4`.
    pub fn arguments(&self, p: &PointE3) -> [ComplexScalar; 4] {
        let (xi1, xi2) = self.gen.xi(p);
        match self.side {
            Side::Right => [xi1, xi2, xi1, xi2],
            Side::Left => [xi1, xi2, xi2, xi1],
        }
    }

    fn apply(&self, fs: &[HolomorphicFn; 4], p: &PointE3) -> Result<Quaternion, EvalError> {
        let args = self.arguments(p);
        let mut c = [Complex64::default(); 4];
        for k in 0..4 {
            if let Some((pole, distance)) = fs[k].pole_near(args[k]) {
                return Err(EvalError::NearPole { component: k + 1, xi: args[k], pole, distance });
            }
            c[k] = fs[k].value(args[k]);
        }
        let q = Quaternion { c };
        if q.is_finite() {
            Ok(q)
        } else {
            Err(EvalError::NonFinite { point: *p })
        }
    }

    pub fn eval(&self, p: &PointE3) -> Result<Quaternion, EvalError> {
        self.apply(&self.f, p)
    }

    /// `Φ'(ζ)` (or `Φ̂'(ζ)`), the componentwise derivative at the same arguments.
    pub fn derivative(&self, p: &PointE3) -> Result<Quaternion, EvalError> {
        let d = [
            self.f[0].derivative(),
            self.f[1].derivative(),
            self.f[2].derivative(),
            self.f[3].derivative(),
        ];
        self.apply(&d, p)
    }

    /// A same-sided map whose derivative is `self`, if every component has a
    /// closed-form primitive. Its increments give exact open-arc integrals.
    pub fn primitive(&self) -> Option<MonogenicMap> {
        Some(MonogenicMap {
            side: self.side,
            f: [
                self.f[0].antiderivative()?,
                self.f[1].antiderivative()?,
                self.f[2].antiderivative()?,
                self.f[3].antiderivative()?,
            ],
            gen: self.gen,
        })
    }

    /// `‖(Φ(ζ + εh) − Φ(ζ)) ε⁻¹ − h Φ'(ζ)‖` for `form = Right`, or with
    /// `Φ'(ζ) h` for `form = Left`. `h` is given by its real coordinates.
    pub fn gateaux_residual(&self, p: &PointE3, h: &PointE3, eps: f64, form: Side) -> Result<f64, EvalError> {
        let shifted = *p + *h * eps;
        let quotient = (self.eval(&shifted)? - self.eval(p)?) * (1.0 / eps);
        let hq = self.gen.embed(h);
        let d = self.derivative(p)?;
        let model = match form {
            Side::Right => hq * d,
            Side::Left => d * hq,
        };
        Ok((quotient - model).norm_e())
    }

    pub fn to_generic(&self) -> GenericMap {
        let m = self.clone();
        GenericMap::new(format!("{}-monogenic", self.side), move |p| m.eval(p))
    }
}

type MapFn = dyn Fn(&PointE3) -> Result<Quaternion, EvalError> + Send + Sync;

/// An arbitrary mapping `E3 → H(C)`, `Ψ = Σ (U_k + i V_k) e_k`.
#[derive(Clone)]
pub struct GenericMap {
    label: String,
    f: Arc<MapFn>,
}

impl fmt::Debug for GenericMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericMap").field("label", &self.label).finish_non_exhaustive()
    }
}

/// Scalar factors available to term-built generic maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    One,
    X,
    Y,
    Z,
    Xi1,
    Xi2,
    ConjXi1,
    ConjXi2,
}

/// One summand `coef · factor(ζ) · e_basis` of a term-built map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    /// Zero-based e-basis index.
    pub basis: usize,
    pub coef: Complex64,
    pub factor: Factor,
    pub power: u32,
}

impl GenericMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&PointE3) -> Result<Quaternion, EvalError> + Send + Sync + 'static,
    {
        GenericMap { label: label.into(), f: Arc::new(f) }
    }

    pub fn constant(q: Quaternion) -> Self {
        GenericMap::new("constant", move |_| Ok(q))
    }

    /// `Σ coef · factor(ζ)^power · e_basis`.
    pub fn from_terms(terms: Vec<Term>, gen: GeneratorTriple) -> Self {
        GenericMap::new("terms", move |p| {
            let (xi1, xi2) = gen.xi(p);
            let mut q = Quaternion::ZERO;
            for t in &terms {
                let v = match t.factor {
                    Factor::One => Complex64::new(1.0, 0.0),
                    Factor::X => Complex64::new(p.x, 0.0),
                    Factor::Y => Complex64::new(p.y, 0.0),
                    Factor::Z => Complex64::new(p.z, 0.0),
                    Factor::Xi1 => xi1,
                    Factor::Xi2 => xi2,
                    Factor::ConjXi1 => xi1.conj(),
                    Factor::ConjXi2 => xi2.conj(),
                };
                q.c[t.basis] += t.coef * v.powu(t.power);
            }
            Ok(q)
        })
    }

    /// Builds `Σ (U_k + i V_k) e_k` from eight real component functions
    /// ordered `U1, V1, U2, V2, U3, V3, U4, V4`.
    pub fn from_components<F>(label: impl Into<String>, components: [F; 8]) -> Self
    where
        F: Fn(&PointE3) -> f64 + Send + Sync + 'static,
    {
        GenericMap::new(label, move |p| {
            let r: [f64; 8] = std::array::from_fn(|j| components[j](p));
            let q = Quaternion::from_reals(r);
            if q.is_finite() {
                Ok(q)
            } else {
                Err(EvalError::NonFinite { point: *p })
            }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn eval(&self, p: &PointE3) -> Result<Quaternion, EvalError> {
        (self.f)(p)
    }

    pub fn component_functions(&self) -> ComponentFunctions {
        ComponentFunctions { map: self.clone() }
    }

    /// Derivative-free Gâteaux defect. The derivative is estimated along
    /// `h = i1` (the unit, for which both sided forms coincide) and the
    /// sided model is then tested along `h`.
    pub fn gateaux_defect(&self, gen: &GeneratorTriple, p: &PointE3, h: &PointE3, eps: f64, form: Side) -> Result<f64, EvalError> {
        let base = self.eval(p)?;
        let d = (self.eval(&(*p + PointE3::new(eps, 0.0, 0.0)))? - base) * (1.0 / eps);
        let quotient = (self.eval(&(*p + *h * eps))? - base) * (1.0 / eps);
        let hq = gen.embed(h);
        let model = match form {
            Side::Right => hq * d,
            Side::Left => d * hq,
        };
        Ok((quotient - model).norm_e())
    }
}

/// Real and imaginary parts `U_k, V_k` of a mapping's e-coefficients.
#[derive(Clone, Debug)]
pub struct ComponentFunctions {
    map: GenericMap,
}

impl ComponentFunctions {
    /// `U_k` for `k` in `1..=4`.
    pub fn u(&self, k: usize, p: &PointE3) -> Result<f64, EvalError> {
        Ok(self.map.eval(p)?.c[k - 1].re)
    }

    /// `V_k` for `k` in `1..=4`.
    pub fn v(&self, k: usize, p: &PointE3) -> Result<f64, EvalError> {
        Ok(self.map.eval(p)?.c[k - 1].im)
    }

    /// `(U1, V1, ..., U4, V4)` at `p`.
    pub fn sample(&self, p: &PointE3) -> Result<[f64; 8], EvalError> {
        Ok(self.map.eval(p)?.to_reals())
    }

    /// Rebuilds `Σ (U_k + i V_k) e_k` from the component samplers.
    pub fn reassemble(&self) -> GenericMap {
        let me = self.clone();
        GenericMap::new(format!("{}-reassembled", self.map.label()), move |p| {
            let mut r = [0.0; 8];
            for k in 1..=4 {
                r[2 * (k - 1)] = me.u(k, p)?;
                r[2 * (k - 1) + 1] = me.v(k, p)?;
            }
            Ok(Quaternion::from_reals(r))
        })
    }
}
