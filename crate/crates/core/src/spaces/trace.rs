//! Face traces on the triangular faces of the reference pyramid and the
//! linear conditions that make them match a tetrahedral neighbour.
//!
//! A restricted component is a combination of `p^e (1-q)^m` in the face
//! parameters `(p, q)`, where `q = zeta`. It is a polynomial exactly when no
//! term has `m < 0`, and then it is expanded into ordinary monomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{nullspace, SparseVec};
use crate::ratpoly::RationalPoly;
use crate::Rational;

use super::FormPoly;

/// Triangular faces of the reference pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    /// `eta = 0`, parameters `(xi, zeta)`.
    Eta0,
    /// `xi = 0`, parameters `(eta, zeta)`.
    Xi0,
    /// `xi = 1 - zeta`, parameters `(eta, zeta)`.
    Xi1,
    /// `eta = 1 - zeta`, parameters `(xi, zeta)`.
    Eta1,
    /// `zeta = 0`, parameters `(xi, eta)`.
    Base,
}

impl Face {
    pub const TRIANGLES: [Face; 4] = [Face::Eta0, Face::Xi0, Face::Xi1, Face::Eta1];
    pub const ALL: [Face; 5] = [Face::Eta0, Face::Xi0, Face::Xi1, Face::Eta1, Face::Base];

    pub fn is_triangle(self) -> bool {
        self != Face::Base
    }

    /// Reference parametrization `F(p, q) = origin + p t_p + q t_q`; triangles
    /// use `p, q >= 0, p + q <= 1`, the base the unit square.
    pub fn frame(self) -> ([i64; 3], [i64; 3], [i64; 3]) {
        match self {
            Face::Eta0 => ([0, 0, 0], [1, 0, 0], [0, 0, 1]),
            Face::Xi0 => ([0, 0, 0], [0, 1, 0], [0, 0, 1]),
            Face::Xi1 => ([1, 0, 0], [0, 1, 0], [-1, 0, 1]),
            Face::Eta1 => ([0, 1, 0], [1, 0, 0], [0, -1, 1]),
            Face::Base => ([0, 0, 0], [1, 0, 0], [0, 1, 0]),
        }
    }

    fn restrict(self, p: &RationalPoly) -> RationalPoly {
        match self {
            Face::Eta0 => p.restrict_y(0),
            Face::Xi0 => p.restrict_x(0),
            Face::Xi1 => p.restrict_x(1),
            Face::Eta1 => p.restrict_y(1),
            Face::Base => p.clone(),
        }
    }

    /// Tangential components of a reference 1-form along the face parameters.
    pub fn tangential(self, hat: &[RationalPoly]) -> [RationalPoly; 2] {
        match self {
            Face::Eta0 => [hat[0].clone(), hat[2].clone()],
            Face::Xi0 => [hat[1].clone(), hat[2].clone()],
            Face::Xi1 => [hat[1].clone(), &hat[2] - &hat[0]],
            Face::Eta1 => [hat[0].clone(), &hat[2] - &hat[1]],
            Face::Base => [hat[0].clone(), hat[1].clone()],
        }
    }

    /// Density of a reference 2-form (proxy `(u23, -u13, u12)`) against the
    /// face parameters.
    pub fn normal(self, hat: &[RationalPoly]) -> RationalPoly {
        match self {
            Face::Eta0 => -&hat[1],
            Face::Xi0 => hat[0].clone(),
            Face::Xi1 => &hat[0] + &hat[2],
            Face::Eta1 => -(&hat[1] + &hat[2]),
            Face::Base => hat[2].clone(),
        }
    }
}

/// Monomial coefficients `p^i q^j` of a face polynomial.
pub type FacePoly = BTreeMap<(u32, u32), Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    /// A term with a negative power of `(1 - q)`.
    Pole { face: Face, comp: usize, e: u32, m: i64 },
    /// A polynomial coefficient above the allowed degree.
    High { face: Face, comp: usize, i: u32, j: u32 },
    /// A coefficient of `p b_p + q b_q` in the top degree.
    Radial { face: Face, i: u32, j: u32 },
}

#[derive(Default)]
struct Violations {
    keys: BTreeMap<Key, Rational>,
}

impl Violations {
    fn add(&mut self, key: Key, v: Rational) {
        let e = self.keys.entry(key).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.keys.remove(&key);
        }
    }
}

/// Expands a restricted component into face monomials, recording poles.
fn face_polynomial(face: Face, comp: usize, p: &RationalPoly, out: &mut Violations) -> FacePoly {
    let mut poly = FacePoly::new();
    if face == Face::Base {
        for (mo, v) in p.terms() {
            *poly.entry((mo.a, mo.b)).or_insert_with(Rational::zero) += v;
        }
        poly.retain(|_, v| !v.is_zero());
        return poly;
    }
    for (mo, v) in face.restrict(p).terms() {
        let e = mo.a + mo.b;
        let m = mo.c - e as i64;
        if m < 0 {
            out.add(Key::Pole { face, comp, e, m }, v.clone());
            continue;
        }
        for j in 0..=m as u32 {
            let mut c = Rational::from_integer(binomial(BigInt::from(m), BigInt::from(j))) * v;
            if j % 2 == 1 {
                c = -c;
            }
            let entry = poly.entry((e, j)).or_insert_with(Rational::zero);
            *entry += c;
        }
    }
    poly.retain(|_, v| !v.is_zero());
    poly
}

fn limit_degree(face: Face, comp: usize, poly: &FacePoly, max: u32, out: &mut Violations) {
    for (&(i, j), v) in poly {
        if i + j > max {
            out.add(Key::High { face, comp, i, j }, v.clone());
        }
    }
}

/// Everything a form would have to change to have conforming traces.
///
/// The returned vector is keyed by an internal enumeration of the possible
/// violations; it is empty exactly when the traces on all four triangular
/// faces lie in the order-`k` tetrahedral trace space of degree `s`.
pub fn trace_violation(form: &FormPoly, k: usize) -> Vec<(String, Rational)> {
    violations(form, k).keys.into_iter().map(|(key, v)| (format!("{key:?}"), v)).collect()
}

fn violations(form: &FormPoly, k: usize) -> Violations {
    let mut out = Violations::default();
    let hat = form.pullback_components();
    let k = k as u32;
    for face in Face::TRIANGLES {
        match form.degree() {
            0 => {
                let poly = face_polynomial(face, 0, &hat[0], &mut out);
                limit_degree(face, 0, &poly, k, &mut out);
            }
            1 => {
                let [t0, t1] = face.tangential(&hat);
                let p0 = face_polynomial(face, 0, &t0, &mut out);
                let p1 = face_polynomial(face, 1, &t1, &mut out);
                limit_degree(face, 0, &p0, k, &mut out);
                limit_degree(face, 1, &p1, k, &mut out);
                // the top-degree part must be orthogonal to the position vector
                for (&(i, j), v) in p0.iter().filter(|((i, j), _)| i + j == k) {
                    out.add(Key::Radial { face, i: i + 1, j }, v.clone());
                }
                for (&(i, j), v) in p1.iter().filter(|((i, j), _)| i + j == k) {
                    out.add(Key::Radial { face, i, j: j + 1 }, v.clone());
                }
            }
            2 => {
                let poly = face_polynomial(face, 0, &face.normal(&hat), &mut out);
                limit_degree(face, 0, &poly, k.saturating_sub(1), &mut out);
            }
            _ => {}
        }
    }
    out
}

/// Exact polynomial trace of a form on a face in the face parameters:
/// the value (`s = 0`), the two tangential components (`s = 1`) or the
/// normal density (`s = 2`). 3-forms have no trace.
pub fn face_trace(form: &FormPoly, face: Face) -> Result<Vec<FacePoly>> {
    let hat = form.pullback_components();
    let comps: Vec<RationalPoly> = match form.degree() {
        0 => vec![hat[0].clone()],
        1 => face.tangential(&hat).into(),
        2 => vec![face.normal(&hat)],
        _ => vec![],
    };
    let mut out = Violations::default();
    let polys: Vec<FacePoly> = comps.iter().enumerate().map(|(i, c)| face_polynomial(face, i, c, &mut out)).collect();
    if out.keys.is_empty() {
        Ok(polys)
    } else {
        Err(Error::NotInSpace)
    }
}

/// Subspace of `span(basis)` with conforming traces, as exact combinations of
/// the basis.
pub(super) fn conforming_subspace(basis: &[FormPoly], s: usize, k: usize) -> Vec<FormPoly> {
    if s == 3 {
        return basis.to_vec();
    }
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let cols: Vec<SparseVec<Rational>> = basis
        .iter()
        .map(|f| {
            violations(f, k)
                .keys
                .into_iter()
                .map(|(key, v)| {
                    let n = index.len();
                    (*index.entry(key).or_insert(n), v)
                })
                .collect()
        })
        .collect();
    nullspace(&cols).into_iter().map(|y| FormPoly::combine(s, basis, &y)).collect()
}
