#![allow(dead_code)]

use num_traits::{One, ToPrimitive, Zero};
use pyrafem::element::FormField;
use pyrafem::geometry::AffinePyramid;
use pyrafem::quadrature::conical_rule;
use pyrafem::Rational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn dyadic(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi).into(), 16.into())
}

/// Random affine pyramid with dyadic coordinates, exactly representable in
/// `f64`.
pub fn random_pyramid(rng: &mut ChaCha8Rng) -> AffinePyramid<Rational> {
    loop {
        let mut v = || [dyadic(rng, -4, 4), dyadic(rng, -4, 4), dyadic(rng, -4, 4)];
        let v0 = v();
        let mut e1 = v();
        let mut e2 = v();
        let mut ap = v();
        e1[0] += Rational::one();
        e2[1] += Rational::one();
        ap[2] += Rational::one();
        ap[0] += &v0[0];
        ap[1] += &v0[1];
        ap[2] += &v0[2];
        if let Ok(k) = AffinePyramid::new(v0, e1, e2, ap) {
            return k;
        }
    }
}

/// `L L^T + I` with dyadic `L`, exactly representable in `f64`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    let l: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| dyadic(rng, -16, 16)).collect()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = (0..n).map(|m| &l[i][m] * &l[j][m]).fold(Rational::zero(), |a, b| a + b);
                    if i == j {
                        v += Rational::one();
                    }
                    v
                })
                .collect()
        })
        .collect()
}

pub fn to_f64(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap()).collect()).collect()
}

pub fn to_float_pyramid(k: &AffinePyramid<Rational>) -> AffinePyramid<f64> {
    k.map_scalar(|v| v.to_f64().unwrap())
}

/// Physical `L^2` distance between the values of two fields.
pub fn l2_distance(a: &dyn FormField, b: &dyn FormField, k: &AffinePyramid<f64>, order: usize) -> f64 {
    let rule = conical_rule::<f64>(order).unwrap();
    rule.integrate_on_pyramid(k, |x| {
        a.value(x).iter().zip(b.value(x)).map(|(p, q)| (p - q) * (p - q)).sum()
    })
    .sqrt()
}

/// Smooth test fields of every degree, with exact derivatives.
type Component = fn(&[f64; 3]) -> Vec<f64>;

pub fn smooth_field(s: usize) -> pyrafem::element::FnField<Component, Component> {
    use pyrafem::element::FnField;
    fn v0(x: &[f64; 3]) -> Vec<f64> {
        vec![(x[0] + 2.0 * x[1]).sin() * x[2].exp()]
    }
    fn d0(x: &[f64; 3]) -> Vec<f64> {
        let (c, s, e) = ((x[0] + 2.0 * x[1]).cos(), (x[0] + 2.0 * x[1]).sin(), x[2].exp());
        vec![c * e, 2.0 * c * e, s * e]
    }
    fn v1(x: &[f64; 3]) -> Vec<f64> {
        vec![x[1].sin() * x[2], x[2].cos() * x[0], x[0].exp() * x[1]]
    }
    fn d1(x: &[f64; 3]) -> Vec<f64> {
        vec![
            x[0].exp() + x[0] * x[2].sin(),
            x[1].sin() - x[1] * x[0].exp(),
            x[2].cos() - x[2] * x[1].cos(),
        ]
    }
    fn v2(x: &[f64; 3]) -> Vec<f64> {
        vec![x[0].sin() * x[2], x[1].cos() * x[0], x[2].exp() * x[1]]
    }
    fn d2(x: &[f64; 3]) -> Vec<f64> {
        vec![x[0].cos() * x[2] - x[1].sin() * x[0] + x[2].exp() * x[1]]
    }
    fn v3(x: &[f64; 3]) -> Vec<f64> {
        vec![(x[0] * x[1]).cos() + x[2] * x[2]]
    }
    fn d3(_: &[f64; 3]) -> Vec<f64> {
        vec![]
    }
    match s {
        0 => FnField::new(0, v0, d0),
        1 => FnField::new(1, v1, d1),
        2 => FnField::new(2, v2, d2),
        _ => FnField::new(3, v3, d3),
    }
}
