#![allow(dead_code)]

use biquat::{Curve, Factor, GeneratorTriple, GenericMap, HolomorphicFn, MonogenicMap, PointE3, Quaternion, Side, Term, WobblyLoop};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(r: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
}

pub fn quaternion(r: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(complex(r, 1.0), complex(r, 1.0), complex(r, 1.0), complex(r, 1.0))
}

pub fn point(r: &mut ChaCha8Rng, half: f64) -> PointE3 {
    PointE3::new(r.gen_range(-half..half), r.gen_range(-half..half), r.gen_range(-half..half))
}

pub fn unit(r: &mut ChaCha8Rng) -> PointE3 {
    loop {
        let p = point(r, 1.0);
        let n = p.norm();
        if n > 1e-3 {
            return p * (1.0 / n);
        }
    }
}

/// A random closed or open curve inside `[-0.5, 0.5]³`.
pub fn curve(r: &mut ChaCha8Rng) -> Curve {
    match r.gen_range(0..5) {
        0 => Curve::ellipse(point(r, 0.1), point(r, 0.3), point(r, 0.3)),
        1 => {
            let k = r.gen_range(3..7);
            Curve::polyline((0..k).map(|_| point(r, 0.5)).collect(), r.gen_bool(0.5)).unwrap()
        }
        2 => Curve::wobbly(WobblyLoop {
            center: point(r, 0.1),
            u: PointE3::new(0.3, 0.0, 0.0),
            v: PointE3::new(0.0, 0.3, 0.0),
            w: PointE3::new(0.0, 0.0, 1.0),
            radius: 1.0,
            amplitude: r.gen_range(0.0..0.3),
            lobes: r.gen_range(1..5),
            lift: r.gen_range(0.0..0.1),
            lift_frequency: r.gen_range(1..4),
        }),
        3 => Curve::arc(point(r, 0.1), point(r, 0.3), point(r, 0.3), r.gen_range(0.0..0.5), r.gen_range(0.5..1.0)),
        _ => Curve::segment(point(r, 0.5), point(r, 0.5)),
    }
}

pub fn polynomial(r: &mut ChaCha8Rng, degree: usize) -> HolomorphicFn {
    HolomorphicFn::Polynomial((0..=degree).map(|_| complex(r, 1.0)).collect())
}

/// Random generic map mixing monogenic-looking and non-monogenic terms.
pub fn generic_map(r: &mut ChaCha8Rng, gen: GeneratorTriple) -> GenericMap {
    const FACTORS: [Factor; 8] = [
        Factor::One,
        Factor::X,
        Factor::Y,
        Factor::Z,
        Factor::Xi1,
        Factor::Xi2,
        Factor::ConjXi1,
        Factor::ConjXi2,
    ];
    let k = r.gen_range(1..6);
    let terms = (0..k)
        .map(|_| Term {
            basis: r.gen_range(0..4),
            coef: complex(r, 1.0),
            factor: FACTORS[r.gen_range(0..FACTORS.len())],
            power: r.gen_range(0..3),
        })
        .collect();
    GenericMap::from_terms(terms, gen)
}

/// Random G-monogenic map with polynomial or exponential components.
pub fn monogenic_map(r: &mut ChaCha8Rng, side: Side, gen: GeneratorTriple) -> MonogenicMap {
    let f = std::array::from_fn(|_| {
        if r.gen_bool(0.25) {
            HolomorphicFn::exp(complex(r, 1.0), complex(r, 1.0))
        } else {
            let d = r.gen_range(0..4);
            polynomial(r, d)
        }
    });
    MonogenicMap::new(side, f, gen)
}

/// Right map whose components all have a non-vanishing second derivative
/// near the origin and whose `F3` has `|F3'| >= 0.6` on `|w| <= 2`.
pub fn curved_right_map(r: &mut ChaCha8Rng, gen: GeneratorTriple) -> MonogenicMap {
    let quad = |r: &mut ChaCha8Rng| {
        let c2 = Complex64::from_polar(r.gen_range(0.5..1.0), r.gen_range(0.0..std::f64::consts::TAU));
        HolomorphicFn::Polynomial(vec![complex(r, 1.0), complex(r, 1.0), c2])
    };
    let c1 = Complex64::from_polar(r.gen_range(1.0..1.5), r.gen_range(0.0..std::f64::consts::TAU));
    let c2 = Complex64::from_polar(r.gen_range(0.02..0.1), r.gen_range(0.0..std::f64::consts::TAU));
    let c3 = Complex64::from_polar(r.gen_range(0.01..0.05), r.gen_range(0.0..std::f64::consts::TAU));
    let f3 = HolomorphicFn::Polynomial(vec![complex(r, 0.5), c1, c2, c3]);
    let f1 = if r.gen_bool(0.5) { quad(r) } else { HolomorphicFn::exp(Complex64::from_polar(r.gen_range(0.5..1.0), 0.3), complex(r, 1.0) + 0.5) };
    MonogenicMap::new(Side::Right, [f1, quad(r), f3, quad(r)], gen)
}
