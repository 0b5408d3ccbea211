use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{infinite_weight, poly_matvec};
use crate::linalg::SparseVec;
use crate::ratpoly::{Axis, Monomial, RationalPoly};
use crate::Rational;

/// Number of proxy components of an `s`-form in three dimensions.
pub const fn component_count(s: usize) -> usize {
    match s {
        0 | 3 => 1,
        _ => 3,
    }
}

/// An `s`-form given by its proxy components in infinite-pyramid coordinates.
///
/// 1-forms are `(u1, u2, u3)`; 2-forms are `(u23, -u13, u12)`, so that `d`
/// acts as grad, curl and div.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FormPoly {
    s: usize,
    comps: Vec<RationalPoly>,
}

impl FormPoly {
    pub fn new(s: usize, comps: Vec<RationalPoly>) -> Result<Self> {
        if s > 3 {
            return Err(Error::Degree(s));
        }
        if comps.len() != component_count(s) {
            return Err(Error::DimensionMismatch(format!(
                "a {s}-form has {} components, got {}",
                component_count(s),
                comps.len()
            )));
        }
        Ok(Self { s, comps })
    }

    pub fn zero(s: usize) -> Self {
        Self { s, comps: vec![RationalPoly::zero(); component_count(s)] }
    }

    pub fn scalar(s: usize, p: RationalPoly) -> Self {
        debug_assert!(s == 0 || s == 3);
        Self { s, comps: vec![p] }
    }

    pub fn vector(s: usize, comps: [RationalPoly; 3]) -> Self {
        debug_assert!(s == 1 || s == 2);
        Self { s, comps: comps.into() }
    }

    /// The 1- or 2-form with a single non-zero component.
    pub fn unit(s: usize, i: usize, p: RationalPoly) -> Self {
        let mut f = Self::zero(s);
        f.comps[i] = p;
        f
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn components(&self) -> &[RationalPoly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RationalPoly::is_zero)
    }

    pub fn scale(&self, v: &Rational) -> Self {
        Self { s: self.s, comps: self.comps.iter().map(|c| c.scale(v)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.s, other.s);
        Self { s: self.s, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.s, other.s);
        Self { s: self.s, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    /// `sum_j coeffs[j] * forms[j]`.
    pub fn combine(s: usize, forms: &[FormPoly], coeffs: &[Rational]) -> Self {
        let mut out = Self::zero(s);
        for (f, c) in forms.iter().zip(coeffs) {
            if !num_traits::Zero::is_zero(c) {
                out = out.add(&f.scale(c));
            }
        }
        out
    }

    /// grad, curl or div in infinite-pyramid coordinates.
    pub fn exterior_derivative(&self) -> Result<Self> {
        let d = |i: usize, ax: Axis| self.comps[i].partial_derivative(ax);
        match self.s {
            0 => Ok(Self::vector(1, [d(0, Axis::X), d(0, Axis::Y), d(0, Axis::Z)])),
            1 => Ok(Self::vector(
                2,
                [
                    &d(2, Axis::Y) - &d(1, Axis::Z),
                    &d(0, Axis::Z) - &d(2, Axis::X),
                    &d(1, Axis::X) - &d(0, Axis::Y),
                ],
            )),
            2 => Ok(Self::scalar(3, &(&d(0, Axis::X) + &d(1, Axis::Y)) + &d(2, Axis::Z))),
            s => Err(Error::Degree(s)),
        }
    }

    /// Reference-coordinate components composed with the projective map,
    /// `w^(s) u~`. Their finite realizations are the reference proxies.
    pub fn pullback_components(&self) -> Vec<RationalPoly> {
        let w = infinite_weight(self.s).expect("degree checked on construction");
        poly_matvec(&w.forward, &self.comps)
    }

    /// Inverse of [`Self::pullback_components`].
    pub fn from_reference(s: usize, hat: &[RationalPoly]) -> Result<Self> {
        let w = infinite_weight(s)?;
        if hat.len() != component_count(s) {
            return Err(Error::DimensionMismatch(format!("{} reference components for a {s}-form", hat.len())));
        }
        Self::new(s, poly_matvec(&w.inverse, hat))
    }
}

impl fmt::Debug for FormPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-form(", self.s)?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Assigns column indices to `(component, monomial)` pairs so that forms can
/// be fed to the exact elimination routines.
#[derive(Debug, Default, Clone)]
pub struct Coords {
    index: BTreeMap<(usize, Monomial), usize>,
}

impl Coords {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vector(&mut self, form: &FormPoly) -> SparseVec<Rational> {
        let mut out = SparseVec::new();
        for (i, comp) in form.comps.iter().enumerate() {
            for (m, v) in comp.terms() {
                let next = self.index.len();
                let col = *self.index.entry((i, *m)).or_insert(next);
                out.insert(col, v.clone());
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Like [`Self::vector`] but without assigning new columns; `None` if the
    /// form uses a pair that has no column yet.
    pub fn lookup(&self, form: &FormPoly) -> Option<SparseVec<Rational>> {
        let mut out = SparseVec::new();
        for (i, comp) in form.comps.iter().enumerate() {
            for (m, v) in comp.terms() {
                out.insert(*self.index.get(&(i, *m))?, v.clone());
            }
        }
        Some(out)
    }

    pub fn vectors(&mut self, forms: &[FormPoly]) -> Vec<SparseVec<Rational>> {
        forms.iter().map(|f| self.vector(f)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::int;

    #[test]
    fn gradient_example() {
        let u = FormPoly::scalar(0, RationalPoly::monomial(1, 0, 1));
        let g = u.exterior_derivative().unwrap();
        let expect = [
            RationalPoly::monomial(0, 0, 1),
            RationalPoly::zero(),
            -RationalPoly::monomial(1, 0, 2),
        ];
        assert_eq!(g.components(), &expect);
    }

    #[test]
    fn derivative_of_three_form_fails() {
        let u = FormPoly::scalar(3, RationalPoly::one());
        assert_eq!(u.exterior_derivative(), Err(Error::Degree(3)));
    }

    #[test]
    fn pullback_round_trip() {
        let u = FormPoly::vector(
            2,
            [RationalPoly::monomial(1, 2, 3), RationalPoly::monomial(0, 1, 4), RationalPoly::monomial(2, 0, 2)],
        );
        let hat = u.pullback_components();
        assert_eq!(FormPoly::from_reference(2, &hat).unwrap(), u);
        let vol = FormPoly::scalar(3, RationalPoly::monomial(0, 0, 4));
        assert_eq!(vol.pullback_components(), vec![RationalPoly::one()]);
    }

    #[test]
    fn coords_share_columns() {
        let mut c = Coords::new();
        let a = FormPoly::scalar(0, RationalPoly::monomial(1, 0, 1));
        let b = FormPoly::scalar(0, &RationalPoly::monomial(1, 0, 1) + &RationalPoly::one());
        let va = c.vector(&a);
        let vb = c.vector(&b);
        assert_eq!(va.get(&0), Some(&int(1)));
        assert_eq!(vb.len(), 2);
    }
}
