//! Homotopies `H(s, t)` contracting a closed boundary curve `γ = H(0, ·)` to an
//! interior point `ζ0 = H(1, ·)`.

use std::sync::Arc;

use crate::curve::{Curve, CLOSED_TOLERANCE};
use crate::error::{Error, Result};
use crate::space::PointE3;

#[derive(Debug)]
enum Kind {
    /// `(1 - s) γ(t) + s ζ0`.
    Radial,
    /// `(1 - s) γ(t + turns·s mod 1) + s ζ0`: the level curves rotate while shrinking.
    Twisted { turns: f64 },
    /// `(1 - s) γ(t) + s ζ0 + 4 s (1 - s) lift`: transversals bulge along `lift`.
    Lifted { lift: PointE3 },
}

#[derive(Debug)]
struct Inner {
    boundary: Curve,
    target: PointE3,
    kind: Kind,
}

/// A continuous map `H: [0,1]² → R³` with `H(0, ·) = γ` and `H(1, ·) ≡ ζ0`.
#[derive(Clone, Debug)]
pub struct Homotopy(Arc<Inner>);

impl Homotopy {
    fn build(boundary: Curve, target: PointE3, kind: Kind) -> Result<Homotopy> {
        if !boundary.is_closed() {
            return Err(Error::InvalidHomotopy("boundary curve is not closed".into()));
        }
        if !target.is_finite() {
            return Err(Error::InvalidHomotopy("non-finite target point".into()));
        }
        Ok(Homotopy(Arc::new(Inner { boundary, target, kind })))
    }

    pub fn radial(boundary: Curve, target: PointE3) -> Result<Homotopy> {
        Homotopy::build(boundary, target, Kind::Radial)
    }

    pub fn twisted(boundary: Curve, target: PointE3, turns: f64) -> Result<Homotopy> {
        Homotopy::build(boundary, target, Kind::Twisted { turns })
    }

    pub fn lifted(boundary: Curve, target: PointE3, lift: PointE3) -> Result<Homotopy> {
        Homotopy::build(boundary, target, Kind::Lifted { lift })
    }

    pub fn boundary(&self) -> &Curve {
        &self.0.boundary
    }

    /// The interior point `ζ0`.
    pub fn target(&self) -> PointE3 {
        self.0.target
    }

    pub fn eval(&self, s: f64, t: f64) -> PointE3 {
        let Inner { boundary, target, kind } = &*self.0;
        let s = s.clamp(0.0, 1.0);
        match kind {
            Kind::Radial => boundary.eval(t) * (1.0 - s) + *target * s,
            Kind::Twisted { turns } => {
                let u = t + turns * s;
                boundary.eval(u - u.floor()) * (1.0 - s) + *target * s
            }
            Kind::Lifted { lift } => boundary.eval(t) * (1.0 - s) + *target * s + *lift * (4.0 * s * (1.0 - s)),
        }
    }

    /// `γ^s(t) = H(s, t)`.
    pub fn level_curve(&self, s: f64) -> Curve {
        Curve::level(self.clone(), s)
    }

    /// `Γ^t(s) = H(s, t)`, running from the boundary (`s = 0`) to `ζ0`.
    pub fn transversal_curve(&self, t: f64) -> Curve {
        Curve::transversal(self.clone(), t, 0.0, 1.0)
    }

    /// `Γ^t` restricted to `s ∈ [s0, s1]`.
    pub fn transversal_arc(&self, t: f64, s0: f64, s1: f64) -> Curve {
        Curve::transversal(self.clone(), t, s0, s1)
    }

    pub(crate) fn level_breakpoints(&self, s: f64) -> Vec<f64> {
        let inner = &*self.0;
        let b = inner.boundary.breakpoints();
        match inner.kind {
            Kind::Radial | Kind::Lifted { .. } => b,
            Kind::Twisted { turns } => std::iter::once(0.0)
                .chain(b)
                .map(|bp| {
                    let u = bp - turns * s;
                    u - u.floor()
                })
                .filter(|&u| u > 0.0 && u < 1.0)
                .collect(),
        }
    }

    /// Largest distance of `H(1, t)` from `ζ0` over `samples` parameters; zero
    /// for the built-in families up to rounding.
    pub fn endpoint_spread(&self, samples: usize) -> f64 {
        let samples = samples.max(1);
        (0..=samples)
            .map(|j| self.eval(1.0, j as f64 / samples as f64).distance(&self.0.target))
            .fold(0.0, f64::max)
    }

    pub fn is_contraction(&self) -> bool {
        self.endpoint_spread(64) <= CLOSED_TOLERANCE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> Curve {
        Curve::circle_xy(PointE3::ORIGIN, 1.0)
    }

    #[test]
    fn level_one_is_constant() {
        let h = Homotopy::radial(circle(), PointE3::new(0.0, 0.0, 0.5)).unwrap();
        assert!(h.is_contraction());
        assert_eq!(h.level_curve(1.0).mes(100).unwrap(), 0.0);
    }

    #[test]
    fn level_zero_is_boundary() {
        let h = Homotopy::twisted(circle(), PointE3::new(0.0, 0.0, 0.5), 0.3).unwrap();
        let a = h.level_curve(0.0).points(50);
        let b = circle().points(50);
        for (p, q) in a.iter().zip(&b) {
            assert!(p.distance(q) < 1e-15);
        }
    }

    #[test]
    fn radial_shrink_scales_length() {
        let h = Homotopy::radial(circle(), PointE3::new(0.1, -0.2, 0.5)).unwrap();
        let full = circle().mes(256).unwrap();
        for s in [0.1, 0.25, 0.5, 0.9] {
            let ls = h.level_curve(s).mes(256).unwrap();
            assert!((ls - (1.0 - s) * full).abs() < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn open_boundary_rejected() {
        let seg = Curve::segment(PointE3::ORIGIN, PointE3::new(1.0, 0.0, 0.0));
        assert!(Homotopy::radial(seg, PointE3::ORIGIN).is_err());
    }

    #[test]
    fn twisted_level_curve_keeps_corners() {
        let sq = Curve::polyline(
            vec![
                PointE3::new(-1.0, -1.0, 0.0),
                PointE3::new(1.0, -1.0, 0.0),
                PointE3::new(1.0, 1.0, 0.0),
                PointE3::new(-1.0, 1.0, 0.0),
            ],
            true,
        )
        .unwrap();
        let h = Homotopy::twisted(sq, PointE3::new(0.0, 0.0, 0.5), 0.1).unwrap();
        // The rotated square's perimeter is (1 - s) times the original at any resolution.
        let lvl = h.level_curve(0.3);
        assert!((lvl.mes(7).unwrap() - 0.7 * 8.0).abs() < 1e-13);
        assert_eq!(lvl.breakpoints().len(), 4);
    }

    #[test]
    fn transversal_runs_from_boundary_to_target() {
        let target = PointE3::new(0.0, 0.0, 0.5);
        let h = Homotopy::lifted(circle(), target, PointE3::new(0.0, 0.0, 0.3)).unwrap();
        let tr = h.transversal_curve(0.2);
        assert!(tr.eval(0.0).distance(&circle().eval(0.2)) < 1e-15);
        assert!(tr.eval(1.0).distance(&target) < 1e-15);
        assert!(tr.mes(64).unwrap().is_finite());
    }
}
