mod common;

use common::*;
use num_traits::{One, ToPrimitive};
use pyrafem::element::*;
use pyrafem::geometry::AffinePyramid;
use pyrafem::quadrature::{conical_rule, rule_for_pair, PyramidRule};
use pyrafem::ratpoly::Axis;
use pyrafem::spaces::{component_count, Family};
use pyrafem::{Error, Rational, RationalPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn third() -> Rational {
    Rational::new(1.into(), 3.into())
}

#[test]
fn constant_mass_entry() {
    let b = LocalBasis::get(0, 1, Family::Reduced).unwrap();
    let i = b.space.basis.iter().position(|f| f.components()[0] == RationalPoly::one()).expect("constant in basis");
    let rule = conical_rule(1).unwrap();
    let m = local_bilinear_matrix(&b, &CoefficientTensor::identity(0), &AffinePyramid::reference(), &rule).unwrap();
    assert!((m[(i, i)] - 1.0 / 3.0).abs() < 1e-15);
    let m = local_bilinear_matrix(&b, &CoefficientTensor::identity(0), &AffinePyramid::scaled(0.5), &rule).unwrap();
    assert!((m[(i, i)] - 0.125 / 3.0).abs() < 1e-15);
    let exact = analytic_bilinear_matrix(&b.space, &[vec![Rational::one()]], &AffinePyramid::reference()).unwrap();
    assert_eq!(exact[i][i], third());
}

#[test]
fn volume_form_entry() {
    let b = LocalBasis::get(3, 1, Family::Underlying).unwrap();
    assert_eq!(b.space.basis[0].components()[0], RationalPoly::monomial(0, 0, 4));
    let exact = analytic_bilinear_matrix(&b.space, &[vec![Rational::one()]], &AffinePyramid::reference()).unwrap();
    assert_eq!(exact[0][0], third());
    let m = local_bilinear_matrix(&b, &CoefficientTensor::identity(3), &AffinePyramid::reference(), &conical_rule(1).unwrap())
        .unwrap();
    assert!((m[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
    // the unweighted square of the infinite-pyramid component
    let sq = RationalPoly::monomial(0, 0, 8).integrate_reference().unwrap();
    assert_eq!(sq, Rational::new(1.into(), 11.into()));
}

#[test]
fn oracle_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = LocalBasis::get(1, 2, Family::Underlying).unwrap();
    let a = random_spd(&mut rng, 3);
    let m = analytic_bilinear_matrix(&b.space, &a, &random_pyramid(&mut rng)).unwrap();
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate().take(i) {
            assert_eq!(v, &m[j][i]);
        }
    }
}

/// Worst entry error, relative to the entry or, below it, to `1e-2` of the
/// matrix scale.
fn worst_error(q: &ElementMatrix, e: &ExactMatrix) -> f64 {
    let e: Vec<Vec<f64>> = e.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap()).collect()).collect();
    let scale = e.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut worst = 0.0f64;
    for (i, row) in e.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((q[(i, j)] - v).abs() / v.abs().max(1e-2 * scale));
        }
    }
    worst
}

fn compare(s: usize, k: usize, rule: &PyramidRule<f64>, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = LocalBasis::get(s, k, Family::Underlying).unwrap();
    let products = reference_products(&b.space).unwrap();
    let a = random_spd(&mut rng, component_count(s));
    let kr = random_pyramid(&mut rng);
    let exact = analytic_with_products(s, &products, &a, &kr).unwrap();
    let coeff = CoefficientTensor::constant(s, to_f64(&a)).unwrap();
    let m = local_bilinear_matrix(&b, &coeff, &to_float_pyramid(&kr), rule).unwrap();
    worst_error(&m, &exact)
}

#[test]
fn quadrature_matches_oracle() {
    for s in 0..4 {
        for k in 1..=2 {
            let err = compare(s, k, &rule_for_pair(k, s, false).unwrap(), 10 * s as u64 + k as u64);
            assert!(err < 1e-12, "s={s} k={k}: {err:e}");
        }
    }
}

#[test]
fn lower_rule_is_not_exact() {
    for s in 0..3 {
        let err = compare(s, 2, &conical_rule(1).unwrap(), 5);
        assert!(err > 1e-6, "s={s}: {err:e}");
    }
}

#[test]
fn volume_forms_allow_reduced_rule() {
    for k in 1..=3 {
        let err = compare(3, k, &rule_for_pair(k, 3, true).unwrap(), k as u64);
        assert!(err < 1e-12, "k={k}: {err:e}");
    }
}

#[test]
fn mismatched_degrees_are_rejected() {
    let b = LocalBasis::get(1, 1, Family::Reduced).unwrap();
    let r = local_bilinear_matrix(&b, &CoefficientTensor::identity(0), &AffinePyramid::reference(), &conical_rule(1).unwrap());
    assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    assert!(CoefficientTensor::constant(1, vec![vec![1.0]]).is_err());
}

#[test]
fn projection_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for family in [Family::Conforming, Family::Reduced] {
        for s in 0..4 {
            for k in 1..=3 {
                let ip = Interpolator::get(s, k, family).unwrap();
                let kf = to_float_pyramid(&random_pyramid(&mut rng));
                let c: Vec<f64> = (0..ip.basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let u = ElementFunction::new(ip.basis.clone(), c.clone(), kf.clone()).unwrap();
                let got = ip.interpolate(&u, &kf).unwrap();
                if k <= 2 {
                    let err = got.iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    let tol = if k == 1 { 1e-12 } else { 1e-11 };
                    assert!(err < tol, "{family:?} s={s} k={k}: {err:e}");
                }
                let v = ElementFunction::new(ip.basis.clone(), got, kf.clone()).unwrap();
                let zero = ElementFunction::new(ip.basis.clone(), vec![0.0; c.len()], kf.clone()).unwrap();
                let rel = l2_distance(&u, &v, &kf, k + 2) / l2_distance(&u, &zero, &kf, k + 2);
                let tol = if k <= 2 { 1e-12 } else { 1e-10 };
                assert!(rel < tol, "{family:?} s={s} k={k}: {rel:e}");
            }
        }
    }
}

fn max_residual(u: &dyn FormField, k: usize, points: &[[f64; 3]]) -> f64 {
    let kf = AffinePyramid::<f64>::reference();
    let c = interpolate(u, k, &kf).unwrap();
    let v = ElementFunction::new(LocalBasis::get(0, k, Family::Conforming).unwrap(), c, kf).unwrap();
    points.iter().map(|p| (u.value(p)[0] - v.value(p)[0]).abs()).fold(0.0, f64::max)
}

fn interior_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(0.0..0.95);
            [rng.gen_range(0.0..1.0) * (1.0 - z), rng.gen_range(0.0..1.0) * (1.0 - z), z]
        })
        .collect()
}

#[test]
fn linear_function_reproduced() {
    let u = FnField::new(0, |x: &[f64; 3]| vec![x[0]], |_: &[f64; 3]| vec![1.0, 0.0, 0.0]);
    assert!(max_residual(&u, 1, &interior_points(50, 1)) < 1e-13);
}

#[test]
fn cubic_reproduced() {
    let u = FnField::new(
        0,
        |x: &[f64; 3]| vec![x[0] * x[0] * x[1]],
        |x: &[f64; 3]| vec![2.0 * x[0] * x[1], x[0] * x[0], 0.0],
    );
    assert!(max_residual(&u, 3, &interior_points(50, 2)) < 1e-11);
}

#[test]
fn interpolation_commutes_with_d() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let kf = to_float_pyramid(&random_pyramid(&mut rng));
    for family in [Family::Conforming, Family::Reduced] {
        for s in 0..3 {
            for k in 1..=3 {
                let u = smooth_field(s);
                let ip = Interpolator::get(s, k, family).unwrap();
                let ip1 = Interpolator::get(s + 1, k, family).unwrap();
                let c = ip.interpolate(&u, &kf).unwrap();
                let c1 = ip1.interpolate(&Derivative(&u), &kf).unwrap();
                let du_h = ElementFunction::new(ip.basis.clone(), c, kf.clone()).unwrap();
                let pdu = ElementFunction::new(ip1.basis.clone(), c1, kf.clone()).unwrap();
                let err = l2_distance(&Derivative(&du_h), &pdu, &kf, k + 3);
                assert!(err < 1e-10, "{family:?} s={s} k={k}: {err:e}");
            }
        }
    }
}

#[test]
fn wrong_degree_field_is_rejected() {
    let ip = Interpolator::get(1, 1, Family::Conforming).unwrap();
    let r = ip.interpolate(&smooth_field(0), &AffinePyramid::reference());
    assert!(matches!(r, Err(Error::DimensionMismatch(_))));
}

#[test]
fn constant_coefficient_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let kf = to_float_pyramid(&random_pyramid(&mut rng));
    for s in 0..4 {
        let a = CoefficientTensor::constant(s, to_f64(&random_spd(&mut rng, component_count(s)))).unwrap();
        for k in 1..=2 {
            let e = consistency_error_element(&smooth_field(s), &a, &kf, k).unwrap();
            assert!(e < 1e-12, "s={s} k={k}: {e:e}");
        }
    }
}

#[test]
fn low_degree_coefficient_on_weighted_pieces() {
    // A of degree k - r integrates exactly against products from X_r
    let kf = AffinePyramid::<f64>::reference();
    for (s, k, r) in [(0, 2, 1), (0, 3, 2), (0, 3, 1), (1, 2, 1), (2, 3, 2), (3, 3, 2)] {
        let b = LocalBasis::get(s, k, Family::ExactWeight(r)).unwrap();
        let deg = (k - r) as i32;
        let a = CoefficientTensor::scalar_field(s, 8, move |x| 1.0 + x[0].powi(deg) + 0.5 * x[1] * x[2].powi(deg - 1));
        let low = local_bilinear_matrix(&b, &a, &kf, &conical_rule(k).unwrap()).unwrap();
        let high = local_bilinear_matrix(&b, &a, &kf, &conical_rule(k + REFERENCE_ORDER_SHIFT).unwrap()).unwrap();
        let err = (&low - &high).amax() / high.amax();
        assert!(err < 1e-12, "s={s} k={k} r={r}: {err:e}");
    }
}

#[test]
fn smooth_coefficient_is_inconsistent() {
    let a = CoefficientTensor::scalar_field(0, 8, |x| x[0].exp() * (2.0 * x[2]).cos());
    let e = consistency_error_element(&smooth_field(0), &a, &AffinePyramid::reference(), 1).unwrap();
    assert!(e > 1e-8, "{e:e}");
}

#[test]
fn consistency_shrinks_with_h() {
    let a = CoefficientTensor::scalar_field(0, 8, |x| 1.0 + x[0] * x[1]);
    let u = smooth_field(0);
    let e = |h: f64| element_consistency(&u, &a, &AffinePyramid::scaled(h), 2, Family::Reduced).unwrap();
    let (e1, e2) = (e(0.5), e(0.25));
    assert!(e1.dual > 4.0 * e2.dual, "{e1:?} {e2:?}");
    assert!(e1.basis_max <= e1.dual * (1.0 + 1e-12));
}

#[test]
fn divergent_third_derivative() {
    // xi eta / (1 - zeta) in finite coordinates
    let v = RationalPoly::monomial(1, 1, 1);
    let d3 = v.reference_partial(Axis::Z).reference_partial(Axis::Z).reference_partial(Axis::Z);
    let sq = &d3 * &d3;
    assert!(matches!(sq.integrate_reference(), Err(Error::Divergent { .. })));
    let kf = AffinePyramid::<f64>::reference();
    let s: Vec<f64> = [5, 10, 15, 20].iter().map(|&q| conical_rule(q).unwrap().integrate_poly(&sq, &kf).unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]), "{s:?}");
    // the rule values track the divergent integral, about 4 int (1 - zeta)^-2
    assert!(s[3] > 9.0 * s[0], "{s:?}");
}
