//! The real three-dimensional subspace E3 = span_R{i1, i2, i3} of H(C).

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix4x3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexScalar, Quaternion};
use crate::error::{Error, Result};

/// Smallest singular value below which a generator triple counts as dependent.
pub const INDEPENDENCE_THRESHOLD: f64 = 1e-10;

/// A point `(x, y, z)` of R³, identified with `ζ = x i1 + y i2 + z i3`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PointE3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointE3 {
    pub const ORIGIN: PointE3 = PointE3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        PointE3 { x, y, z }
    }

    /// Euclidean norm `sqrt(x² + y² + z²)`.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, o: &PointE3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn distance(&self, o: &PointE3) -> f64 {
        (*self - *o).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(&self, o: &PointE3, w: f64) -> PointE3 {
        *self + (*o - *self) * w
    }
}

impl Add for PointE3 {
    type Output = PointE3;
    fn add(self, o: PointE3) -> PointE3 {
        PointE3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for PointE3 {
    type Output = PointE3;
    fn sub(self, o: PointE3) -> PointE3 {
        PointE3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for PointE3 {
    type Output = PointE3;
    fn neg(self) -> PointE3 {
        PointE3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for PointE3 {
    type Output = PointE3;
    fn mul(self, s: f64) -> PointE3 {
        PointE3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Complex parameters of `i2 = a1 e1 + a2 e2` and `i3 = b1 e1 + b2 e2`.
/// `i1 = e1 + e2` is the unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorTriple {
    pub a1: ComplexScalar,
    pub a2: ComplexScalar,
    pub b1: ComplexScalar,
    pub b2: ComplexScalar,
}

/// Outcome of [`GeneratorTriple::check_independence`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Independence {
    pub independent: bool,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl Default for GeneratorTriple {
    /// `a1 = i`, `a2 = 2i`, `b1 = 1 + i`, `b2 = -1 + i`.
    fn default() -> Self {
        GeneratorTriple {
            a1: Complex64::new(0.0, 1.0),
            a2: Complex64::new(0.0, 2.0),
            b1: Complex64::new(1.0, 1.0),
            b2: Complex64::new(-1.0, 1.0),
        }
    }
}

impl GeneratorTriple {
    pub fn new(a1: ComplexScalar, a2: ComplexScalar, b1: ComplexScalar, b2: ComplexScalar) -> Self {
        GeneratorTriple { a1, a2, b1, b2 }
    }

    pub fn i1(&self) -> Quaternion {
        Quaternion::one()
    }

    pub fn i2(&self) -> Quaternion {
        Quaternion::new(self.a1, self.a2, Complex64::default(), Complex64::default())
    }

    pub fn i3(&self) -> Quaternion {
        Quaternion::new(self.b1, self.b2, Complex64::default(), Complex64::default())
    }

    /// The real 4×3 matrix taking `(x, y, z)` to `(Re ξ1, Im ξ1, Re ξ2, Im ξ2)`.
    pub fn real_matrix(&self) -> Matrix4x3<f64> {
        Matrix4x3::new(
            1.0, self.a1.re, self.b1.re, //
            0.0, self.a1.im, self.b1.im, //
            1.0, self.a2.re, self.b2.re, //
            0.0, self.a2.im, self.b2.im,
        )
    }

    /// `i1, i2, i3` are independent over R iff the 4×3 real system has a
    /// trivial kernel, tested through its smallest singular value.
    pub fn check_independence(&self) -> Independence {
        let sv = self.real_matrix().singular_values();
        let sigma_min = sv.min();
        let sigma_max = sv.max();
        Independence {
            independent: sigma_min.is_finite() && sigma_min > INDEPENDENCE_THRESHOLD,
            sigma_min,
            sigma_max,
        }
    }

    /// Returns `self` if the triple is independent.
    pub fn validated(self) -> Result<Self> {
        let ind = self.check_independence();
        if ind.independent {
            Ok(self)
        } else {
            Err(Error::DegenerateGenerators { sigma_min: ind.sigma_min })
        }
    }

    /// Complex coordinates `(ξ1, ξ2)` with `ξk = x + a_k y + b_k z`.
    pub fn xi(&self, p: &PointE3) -> (ComplexScalar, ComplexScalar) {
        (
            p.x + self.a1 * p.y + self.b1 * p.z,
            p.x + self.a2 * p.y + self.b2 * p.z,
        )
    }

    /// `ζ = x i1 + y i2 + z i3 = ξ1 e1 + ξ2 e2`.
    pub fn embed(&self, p: &PointE3) -> Quaternion {
        let (xi1, xi2) = self.xi(p);
        Quaternion::new(xi1, xi2, Complex64::default(), Complex64::default())
    }

    /// Smallest `c` with `norm_e(embed(p)) <= c · ‖p‖` for every `p ∈ R³`:
    /// the spectral norm of [`GeneratorTriple::real_matrix`].
    pub fn component_bound_constant(&self) -> Result<f64> {
        let ind = self.check_independence();
        if !ind.independent {
            return Err(Error::DegenerateGenerators { sigma_min: ind.sigma_min });
        }
        Ok(ind.sigma_max)
    }
}
