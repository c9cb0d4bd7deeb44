//! Arithmetic in the complex quaternion algebra H(C).
//!
//! Elements are stored in the idempotent basis `{e1, e2, e3, e4}`, whose
//! multiplication table is
//!
//! ```text
//!   ·  | e1  e2  e3  e4
//! -----+----------------
//!   e1 | e1  0   e3  0
//!   e2 | 0   e2  0   e4
//!   e3 | 0   e3  0   e1
//!   e4 | e4  0   e2  0
//! ```
//!
//! The unit is `e1 + e2`. The classical basis `{1, I, J, K}` is available as a
//! view through [`BasisChange`].

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Scalar field of the algebra.
pub type ComplexScalar = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);
const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

/// Product of two idempotent basis elements: `Some(k)` means `e_a · e_b = e_k`
/// (zero-based indices), `None` means the product vanishes.
pub const BASIS_PRODUCTS: [[Option<usize>; 4]; 4] = [
    [Some(0), None, Some(2), None],
    [None, Some(1), None, Some(3)],
    [None, Some(2), None, Some(0)],
    [Some(3), None, Some(1), None],
];

/// An element `c1 e1 + c2 e2 + c3 e3 + c4 e4` of H(C).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub c: [ComplexScalar; 4],
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { c: [ZERO; 4] };

    pub const fn new(c1: ComplexScalar, c2: ComplexScalar, c3: ComplexScalar, c4: ComplexScalar) -> Self {
        Quaternion { c: [c1, c2, c3, c4] }
    }

    /// The multiplicative unit `e1 + e2`.
    pub const fn one() -> Self {
        Quaternion { c: [ONE, ONE, ZERO, ZERO] }
    }

    /// Basis element `e_{k+1}` for `k` in `0..4`.
    pub fn basis(k: usize) -> Self {
        let mut c = [ZERO; 4];
        c[k] = ONE;
        Quaternion { c }
    }

    pub fn e1() -> Self {
        Self::basis(0)
    }
    pub fn e2() -> Self {
        Self::basis(1)
    }
    pub fn e3() -> Self {
        Self::basis(2)
    }
    pub fn e4() -> Self {
        Self::basis(3)
    }

    /// Builds an element from the eight real numbers `(U1, V1, ..., U4, V4)`,
    /// i.e. `Σ (U_k + i V_k) e_k`.
    pub fn from_reals(r: [f64; 8]) -> Self {
        Quaternion {
            c: [
                Complex64::new(r[0], r[1]),
                Complex64::new(r[2], r[3]),
                Complex64::new(r[4], r[5]),
                Complex64::new(r[6], r[7]),
            ],
        }
    }

    /// Inverse of [`Quaternion::from_reals`].
    pub fn to_reals(&self) -> [f64; 8] {
        let c = &self.c;
        [c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im, c[3].re, c[3].im]
    }

    /// Product following the idempotent-basis table. `e1, e2, e3, e4` behave as
    /// the matrix units `E11, E22, E12, E21` of 2×2 complex matrices.
    pub fn mul(&self, rhs: &Quaternion) -> Quaternion {
        let [p1, p2, p3, p4] = self.c;
        let [q1, q2, q3, q4] = rhs.c;
        Quaternion {
            c: [
                p1 * q1 + p3 * q4,
                p2 * q2 + p4 * q3,
                p1 * q3 + p3 * q2,
                p2 * q4 + p4 * q1,
            ],
        }
    }

    pub fn scale(&self, s: ComplexScalar) -> Quaternion {
        Quaternion { c: self.c.map(|x| x * s) }
    }

    /// Euclidean norm of the eight real e-basis coefficients.
    pub fn norm_e(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Coefficients over `{1, I, J, K}` under the standard basis change.
    pub fn to_ijk(&self) -> IjkQuaternion {
        BasisChange::standard().to_ijk(self)
    }

    pub fn from_ijk(q: &IjkQuaternion) -> Quaternion {
        BasisChange::standard().from_ijk(q)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion { c: std::array::from_fn(|k| self.c[k] + rhs.c[k]) }
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        for k in 0..4 {
            self.c[k] += rhs.c[k];
        }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion { c: std::array::from_fn(|k| self.c[k] - rhs.c[k]) }
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Quaternion) {
        for k in 0..4 {
            self.c[k] -= rhs.c[k];
        }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion { c: self.c.map(|x| -x) }
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion::mul(&self, &rhs)
    }
}

impl Mul<ComplexScalar> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: ComplexScalar) -> Quaternion {
        self.scale(rhs)
    }
}

impl Mul<Quaternion> for ComplexScalar {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        rhs.scale(self)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        Quaternion { c: self.c.map(|x| x * rhs) }
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |acc, q| acc + q)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .map(|(k, z)| format!("({}{:+}i)e{}", z.re, z.im, k + 1))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// An element of H(C) written over the classical basis `{1, I, J, K}`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct IjkQuaternion(pub [ComplexScalar; 4]);

impl Mul for IjkQuaternion {
    type Output = IjkQuaternion;

    /// Hamilton product with complex coefficients:
    /// `I² = J² = K² = -1`, `IJ = -JI = K`, `JK = -KJ = I`, `KI = -IK = J`.
    fn mul(self, rhs: IjkQuaternion) -> IjkQuaternion {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = rhs.0;
        IjkQuaternion([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ])
    }
}

impl Sub for IjkQuaternion {
    type Output = IjkQuaternion;
    fn sub(self, rhs: IjkQuaternion) -> IjkQuaternion {
        IjkQuaternion(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl IjkQuaternion {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Linear change of basis between `{e1..e4}` and `{1, I, J, K}`.
///
/// Row `k` of `e_in_ijk` holds the `{1, I, J, K}` coefficients of `e_{k+1}`;
/// `ijk_in_e` is its inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisChange {
    pub e_in_ijk: [[ComplexScalar; 4]; 4],
    pub ijk_in_e: [[ComplexScalar; 4]; 4],
}

impl BasisChange {
    /// `e1 = (1 + iI)/2`, `e2 = (1 - iI)/2`, `e3 = (J + iK)/2`, `e4 = (-J + iK)/2`.
    pub const fn standard() -> Self {
        const NHALF: Complex64 = Complex64::new(-0.5, 0.0);
        const NI: Complex64 = Complex64::new(0.0, -1.0);
        const PI_: Complex64 = Complex64::new(0.0, 1.0);
        const NHALF_I: Complex64 = Complex64::new(0.0, -0.5);
        BasisChange {
            e_in_ijk: [
                [HALF, HALF_I, ZERO, ZERO],
                [HALF, NHALF_I, ZERO, ZERO],
                [ZERO, ZERO, HALF, HALF_I],
                [ZERO, ZERO, NHALF, HALF_I],
            ],
            // Row m: e-coefficients of the m-th classical basis element (1, I, J, K).
            ijk_in_e: [
                [ONE, ONE, ZERO, ZERO],
                [NI, PI_, ZERO, ZERO],
                [ZERO, ZERO, ONE, Complex64::new(-1.0, 0.0)],
                [ZERO, ZERO, NI, NI],
            ],
        }
    }

    pub fn to_ijk(&self, q: &Quaternion) -> IjkQuaternion {
        let mut out = [ZERO; 4];
        for (k, row) in self.e_in_ijk.iter().enumerate() {
            for m in 0..4 {
                out[m] += q.c[k] * row[m];
            }
        }
        IjkQuaternion(out)
    }

    pub fn from_ijk(&self, q: &IjkQuaternion) -> Quaternion {
        let mut out = [ZERO; 4];
        for (m, row) in self.ijk_in_e.iter().enumerate() {
            for k in 0..4 {
                out[k] += q.0[m] * row[k];
            }
        }
        Quaternion { c: out }
    }
}
