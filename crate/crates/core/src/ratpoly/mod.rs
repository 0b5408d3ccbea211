//! Exact algebra of rational monomials `x^a y^b (1+z)^(-c)` on the infinite
//! pyramid.
//!
//! Every shape-function component in this crate is a [`RationalPoly`]. In the
//! finite reference coordinates `(xi, eta, zeta)` a monomial realizes as
//! `xi^a eta^b (1-zeta)^(c-a-b)`, which is what [`RationalPoly::integrate_reference`]
//! and [`RationalPoly::evaluate_reference`] work with.

mod space;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

pub use space::SpaceSpec;

/// Exponent triple of `x^a y^b (1+z)^(-c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: i64,
}

impl Monomial {
    pub const fn new(a: u32, b: u32, c: i64) -> Self {
        Self { a, b, c }
    }

    /// Exponent of `(1-zeta)` in the finite-coordinate realization.
    pub fn zeta_power(&self) -> i64 {
        self.c - self.a as i64 - self.b as i64
    }
}

/// Axis of the infinite-pyramid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Finite linear combination of [`Monomial`]s with exact coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// functions.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct RationalPoly {
    terms: BTreeMap<Monomial, Rational>,
}

pub(crate) fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 0)
    }

    pub fn constant(v: Rational) -> Self {
        Self::term(Monomial::new(0, 0, 0), v)
    }

    pub fn monomial(a: u32, b: u32, c: i64) -> Self {
        Self::term(Monomial::new(a, b, c), Rational::one())
    }

    pub fn term(m: Monomial, coeff: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, coeff);
        p
    }

    /// `x^a y^b z^e / (1+z)^k`, expanded through `z = (1+z) - 1`.
    pub fn with_z_numerator(a: u32, b: u32, e: u32, k: i64) -> Self {
        let mut p = Self::zero();
        for j in 0..=e {
            let sign = if (e - j).is_multiple_of(2) { 1 } else { -1 };
            let coeff = Rational::from_integer(binomial(BigInt::from(e), BigInt::from(j)) * sign);
            p.add_term(Monomial::new(a, b, k - j as i64), coeff);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&m) {
            Some(v) => {
                *v += coeff;
                v.is_zero()
            }
            None => {
                self.terms.insert(m, coeff);
                false
            }
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (*m, v * s)).collect(),
        }
    }

    /// Multiplies by `x^da y^db (1+z)^(-dc)`.
    pub fn shift(&self, da: u32, db: u32, dc: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (Monomial::new(m.a + da, m.b + db, m.c + dc), v.clone()))
                .collect(),
        }
    }

    /// Term-wise partial derivative in infinite-pyramid coordinates.
    pub fn partial_derivative(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            match axis {
                Axis::X if m.a > 0 => {
                    out.add_term(Monomial::new(m.a - 1, m.b, m.c), v * int(m.a as i64))
                }
                Axis::Y if m.b > 0 => {
                    out.add_term(Monomial::new(m.a, m.b - 1, m.c), v * int(m.b as i64))
                }
                Axis::Z if m.c != 0 => {
                    out.add_term(Monomial::new(m.a, m.b, m.c + 1), v * int(-m.c))
                }
                _ => {}
            }
        }
        out
    }

    /// Partial derivative of the finite realization along a reference axis
    /// (`X` = xi, `Y` = eta, `Z` = zeta). Every term loses one unit of `c`.
    pub fn reference_partial(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            match axis {
                Axis::X if m.a > 0 => {
                    out.add_term(Monomial::new(m.a - 1, m.b, m.c - 1), v * int(m.a as i64))
                }
                Axis::Y if m.b > 0 => {
                    out.add_term(Monomial::new(m.a, m.b - 1, m.c - 1), v * int(m.b as i64))
                }
                Axis::Z if m.zeta_power() != 0 => {
                    out.add_term(Monomial::new(m.a, m.b, m.c - 1), v * int(-m.zeta_power()))
                }
                _ => {}
            }
        }
        out
    }

    /// Whether every term is a member of the given weighted space.
    pub fn is_member(&self, spec: &SpaceSpec) -> bool {
        self.terms.keys().all(|m| spec.contains_monomial(m))
    }

    /// Exact value of the integral of the finite-coordinate realization over
    /// the reference pyramid `{0 <= zeta <= 1, 0 <= xi, eta <= 1 - zeta}`.
    pub fn integrate_reference(&self) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, v) in &self.terms {
            if m.c <= -3 {
                return Err(Error::Divergent { c: m.c });
            }
            let denom = (m.a as i64 + 1) * (m.b as i64 + 1) * (m.c + 3);
            total += v / int(denom);
        }
        Ok(total)
    }

    /// Floating evaluation of the finite-coordinate realization.
    pub fn evaluate_reference(&self, point: [f64; 3]) -> Result<f64> {
        let [xi, eta, zeta] = point;
        let t = 1.0 - zeta;
        let mut sum = 0.0;
        for (m, v) in &self.terms {
            let p = m.zeta_power();
            if t == 0.0 && p < 0 {
                return Err(Error::Singular);
            }
            sum += v.to_f64().unwrap_or(f64::NAN)
                * xi.powi(m.a as i32)
                * eta.powi(m.b as i32)
                * t.powi(p as i32);
        }
        Ok(sum)
    }

    /// Exact evaluation of the finite-coordinate realization at a rational
    /// point with `zeta < 1`.
    pub fn evaluate_reference_exact(&self, point: &[Rational; 3]) -> Result<Rational> {
        let [xi, eta, zeta] = point;
        let t = Rational::one() - zeta;
        if t.is_zero() {
            return self.apex_value();
        }
        let mut sum = Rational::zero();
        for (m, v) in &self.terms {
            sum += v * pow(xi, m.a as i64) * pow(eta, m.b as i64) * pow(&t, m.zeta_power());
        }
        Ok(sum)
    }

    /// Limit of the realization at the apex `(0,0,1)`.
    ///
    /// Terms with `c > 0` vanish there because `xi, eta <= 1 - zeta`; terms
    /// with `c == 0` must be constants for the limit to exist.
    pub fn apex_value(&self) -> Result<Rational> {
        let mut sum = Rational::zero();
        for (m, v) in &self.terms {
            if m.c < 0 || (m.c == 0 && (m.a > 0 || m.b > 0)) {
                return Err(Error::Singular);
            }
            if m.c == 0 {
                sum += v;
            }
        }
        Ok(sum)
    }

    /// Restricts to the plane `x = value` (`value` is 0 or 1 for pyramid faces).
    pub fn restrict_x(&self, value: i64) -> Self {
        self.restrict_with(|m| match (m.a, value) {
            (0, _) => Some(Monomial::new(0, m.b, m.c)),
            (_, 0) => None,
            _ => Some(Monomial::new(0, m.b, m.c)),
        }, value)
    }

    /// Restricts to the plane `y = value`.
    pub fn restrict_y(&self, value: i64) -> Self {
        self.restrict_with(|m| match (m.b, value) {
            (0, _) => Some(Monomial::new(m.a, 0, m.c)),
            (_, 0) => None,
            _ => Some(Monomial::new(m.a, 0, m.c)),
        }, value)
    }

    /// Restricts to the base plane `z = 0`.
    pub fn restrict_base(&self) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(Monomial::new(m.a, m.b, 0), v.clone());
        }
        out
    }

    fn restrict_with(&self, f: impl Fn(&Monomial) -> Option<Monomial>, value: i64) -> Self {
        debug_assert!(value == 0 || value == 1);
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            if let Some(n) = f(m) {
                out.add_term(n, v.clone());
            }
        }
        out
    }

    /// Largest and smallest `c` present, if any.
    pub fn c_range(&self) -> Option<(i64, i64)> {
        let min = self.terms.keys().map(|m| m.c).min()?;
        let max = self.terms.keys().map(|m| m.c).max()?;
        Some((min, max))
    }

    /// Splits into the parts with a fixed exponent `c`.
    pub fn group_by_weight(&self) -> BTreeMap<i64, RationalPoly> {
        let mut out: BTreeMap<i64, RationalPoly> = BTreeMap::new();
        for (m, v) in &self.terms {
            out.entry(m.c).or_default().add_term(*m, v.clone());
        }
        out
    }

    /// Lowers to a floating representation for fast repeated evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.a as i32, m.b as i32, m.zeta_power() as i32, v.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

pub(crate) fn pow(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if v.is_negative() { " - " } else { " + " })?;
            } else if v.is_negative() {
                write!(f, "-")?;
            }
            write!(f, "{}", v.abs())?;
            if m.a > 0 {
                write!(f, "*x^{}", m.a)?;
            }
            if m.b > 0 {
                write!(f, "*y^{}", m.b)?;
            }
            if m.c != 0 {
                write!(f, "*(1+z)^{}", -m.c)?;
            }
        }
        Ok(())
    }
}

impl Add<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for RationalPoly {
    type Output = RationalPoly;
    fn add(mut self, rhs: RationalPoly) -> RationalPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&RationalPoly> for RationalPoly {
    fn add_assign(&mut self, rhs: &RationalPoly) {
        for (m, v) in &rhs.terms {
            self.add_term(*m, v.clone());
        }
    }
}

impl Sub<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        for (m, v) in &rhs.terms {
            out.add_term(*m, -v.clone());
        }
        out
    }
}

impl Sub for RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: RationalPoly) -> RationalPoly {
        &self - &rhs
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&int(-1))
    }
}

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

impl Mul<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (m, v) in &self.terms {
            for (n, w) in &rhs.terms {
                out.add_term(Monomial::new(m.a + n.a, m.b + n.b, m.c + n.c), v * w);
            }
        }
        out
    }
}

impl Mul for RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: RationalPoly) -> RationalPoly {
        &self * &rhs
    }
}

/// Floating copy of a [`RationalPoly`] in finite-coordinate form
/// `coef * xi^a eta^b (1-zeta)^p`.
#[derive(Debug, Clone, Default)]
pub struct FloatPoly {
    terms: Vec<(i32, i32, i32, f64)>,
}

impl FloatPoly {
    /// Evaluates at a point with `zeta < 1`.
    #[inline]
    pub fn eval(&self, [xi, eta, zeta]: [f64; 3]) -> f64 {
        let t = 1.0 - zeta;
        self.terms
            .iter()
            .map(|&(a, b, p, c)| c * xi.powi(a) * eta.powi(b) * t.powi(p))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_examples() {
        let x = RationalPoly::monomial(1, 0, 0);
        assert_eq!(&x * &x, RationalPoly::monomial(2, 0, 0));
        let w = RationalPoly::monomial(0, 0, 1);
        assert_eq!(&w * &w, RationalPoly::monomial(0, 0, 2));
        // z/(1+z) = 1 - (1+z)^-1
        let p = RationalPoly::with_z_numerator(0, 0, 1, 1);
        assert_eq!(p, &RationalPoly::one() - &RationalPoly::monomial(0, 0, 1));
    }

    #[test]
    fn derivative_examples() {
        let p = RationalPoly::monomial(0, 0, 1).partial_derivative(Axis::Z);
        assert_eq!(p, -RationalPoly::monomial(0, 0, 2));
        let p = RationalPoly::monomial(2, 1, 3).partial_derivative(Axis::X);
        assert_eq!(p, RationalPoly::term(Monomial::new(1, 1, 3), int(2)));
        assert!(RationalPoly::one().partial_derivative(Axis::Z).is_zero());
    }

    #[test]
    fn reference_partial_matches_finite_difference() {
        let mut p = RationalPoly::monomial(2, 1, 1);
        p.add_term(Monomial::new(0, 3, 5), q(-3, 2));
        p.add_term(Monomial::new(1, 0, 4), q(1, 7));
        let pt = [0.2, 0.15, 0.3];
        let h = 1e-6;
        for (i, ax) in Axis::ALL.iter().enumerate() {
            let mut plus = pt;
            let mut minus = pt;
            plus[i] += h;
            minus[i] -= h;
            let fd = (p.evaluate_reference(plus).unwrap() - p.evaluate_reference(minus).unwrap()) / (2.0 * h);
            let exact = p.reference_partial(*ax).evaluate_reference(pt).unwrap();
            assert!((fd - exact).abs() < 1e-7, "{ax:?}: {fd} vs {exact}");
        }
    }

    #[test]
    fn membership_examples() {
        let xy = RationalPoly::monomial(1, 1, 1);
        assert!(xy.is_member(&SpaceSpec::Bracket { l: 1, m: 1, k: 1 }));
        let x2 = RationalPoly::monomial(2, 0, 1);
        assert!(!x2.is_member(&SpaceSpec::Bracket { l: 1, m: 1, k: 1 }));
        let p = RationalPoly::with_z_numerator(0, 0, 2, 3);
        assert!(p.is_member(&SpaceSpec::Tensor { l: 0, m: 0, n: 2, k: 3 }));
        assert!(!p.is_member(&SpaceSpec::Tensor { l: 0, m: 0, n: 1, k: 3 }));
    }

    #[test]
    fn integration_examples() {
        assert_eq!(RationalPoly::one().integrate_reference().unwrap(), q(1, 3));
        assert_eq!(RationalPoly::monomial(1, 1, 2).integrate_reference().unwrap(), q(1, 20));
        assert_eq!(RationalPoly::monomial(2, 3, 7).integrate_reference().unwrap(), q(1, 120));
        assert_eq!(
            RationalPoly::monomial(0, 0, -3).integrate_reference(),
            Err(Error::Divergent { c: -3 })
        );
        assert!(RationalPoly::monomial(0, 0, -2).integrate_reference().is_ok());
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(RationalPoly::one().evaluate_reference([0.3, 0.1, 0.2]).unwrap(), 1.0);
        let v = RationalPoly::monomial(1, 1, 1).evaluate_reference([0.25, 0.25, 0.5]).unwrap();
        assert!((v - 0.125).abs() < 1e-15);
        assert_eq!(
            RationalPoly::monomial(1, 1, 1).evaluate_reference([0.0, 0.0, 1.0]),
            Err(Error::Singular)
        );
    }

    #[test]
    fn apex_limit() {
        let p = &RationalPoly::monomial(1, 1, 1) + &RationalPoly::constant(q(2, 1));
        assert_eq!(p.apex_value().unwrap(), q(2, 1));
    }

    fn arb_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec((0u32..4, 0u32..4, -2i64..6, -5i64..6), 0..6).prop_map(|ts| {
            let mut p = RationalPoly::zero();
            for (a, b, c, v) in ts {
                p.add_term(Monomial::new(a, b, c), int(v));
            }
            p
        })
    }

    /// Spanning-set oracle for `Q_k^{l,m,n}`: reduce `p` against the set
    /// `x^a y^b z^e / (1+z)^k` by exact elimination.
    fn tensor_member_oracle(p: &RationalPoly, l: i64, m: i64, n: i64, k: i64) -> bool {
        use crate::linalg::{SparseVec, Subspace};
        let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
        let mut to_vec = |p: &RationalPoly| -> SparseVec<Rational> {
            p.terms()
                .map(|(m, v)| {
                    let len = index.len();
                    (*index.entry(*m).or_insert(len), v.clone())
                })
                .collect()
        };
        let mut span = Subspace::new();
        if l >= 0 && m >= 0 && n >= 0 {
            for a in 0..=l as u32 {
                for b in 0..=m as u32 {
                    for e in 0..=n as u32 {
                        span.insert(&to_vec(&RationalPoly::with_z_numerator(a, b, e, k)));
                    }
                }
            }
        }
        let v = to_vec(p);
        span.contains(&v)
    }

    proptest! {
        #[test]
        fn tensor_membership_matches_spanning_set(p in arb_poly(), l in -1i64..4, m in -1i64..4, n in -1i64..4, k in 0i64..5) {
            let spec = SpaceSpec::Tensor { l, m, n, k };
            prop_assert_eq!(p.is_member(&spec), tensor_member_oracle(&p, l, m, n, k));
        }

        #[test]
        fn derivative_is_linear_and_leibniz(p in arb_poly(), r in arb_poly(), s in -4i64..5) {
            for axis in Axis::ALL {
                let lhs = (&p.scale(&int(s)) + &r).partial_derivative(axis);
                let rhs = &p.partial_derivative(axis).scale(&int(s)) + &r.partial_derivative(axis);
                prop_assert_eq!(lhs, rhs);
                let prod = (&p * &r).partial_derivative(axis);
                let leib = &(&p.partial_derivative(axis) * &r) + &(&p * &r.partial_derivative(axis));
                prop_assert_eq!(prod, leib);
            }
        }

        #[test]
        fn float_evaluation_matches_exact(p in arb_poly(), i in 1i64..7, j in 1i64..7, l in 0i64..7) {
            // Rational interior point with xi, eta <= 1 - zeta.
            let zeta = q(l, 8);
            let t = Rational::one() - &zeta;
            let xi = &t * q(i, 8);
            let eta = &t * q(j, 8);
            let exact = p.evaluate_reference_exact(&[xi.clone(), eta.clone(), zeta.clone()]).unwrap();
            let point = [xi.to_f64().unwrap(), eta.to_f64().unwrap(), zeta.to_f64().unwrap()];
            let approx = p.evaluate_reference(point).unwrap();
            let ex = exact.to_f64().unwrap();
            let scale: f64 = p.terms().map(|(m, v)| {
                v.to_f64().unwrap().abs() * point[0].powi(m.a as i32) * point[1].powi(m.b as i32) * (1.0 - point[2]).powi(m.zeta_power() as i32)
            }).sum();
            prop_assert!((approx - ex).abs() <= 1e-14 * scale.max(ex.abs()).max(1e-300));
        }
    }
}
