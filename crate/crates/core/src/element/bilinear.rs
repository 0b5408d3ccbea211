use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::AffinePyramid;
use crate::quadrature::PyramidRule;
use crate::spaces::{component_count, SpaceBasis};
use crate::Rational;

use super::local::weights;
use super::{CoefficientTensor, LocalBasis};

pub type ElementMatrix = DMatrix<f64>;
pub type ExactMatrix = Vec<Vec<Rational>>;

/// `|J| W^T A W`: the coefficient acting on reference proxies.
fn pulled_back<T: crate::Field>(a: &[Vec<T>], w: &[Vec<T>], det: &T) -> Vec<Vec<T>> {
    let n = w.len();
    let mut out = vec![vec![T::zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (al, a_row) in a.iter().enumerate() {
                for (be, v) in a_row.iter().enumerate() {
                    acc = acc + w[al][i].clone() * v.clone() * w[be][j].clone();
                }
            }
            *o = acc * det.clone();
        }
    }
    out
}

fn check(basis: &LocalBasis, a: &CoefficientTensor) -> Result<()> {
    if basis.s() != a.s {
        return Err(Error::DimensionMismatch(format!("{}-form basis with a {}-form coefficient", basis.s(), a.s)));
    }
    Ok(())
}

/// `S(A(u_i, u_j))` over a physical pyramid.
pub fn local_bilinear_matrix(
    basis: &LocalBasis,
    a: &CoefficientTensor,
    k: &AffinePyramid<f64>,
    rule: &PyramidRule<f64>,
) -> Result<ElementMatrix> {
    check(basis, a)?;
    let (w, _) = weights(k, basis.s())?;
    let det = k.det();
    let constant = a.is_constant().then(|| pulled_back(&a.eval(&[0.0; 3]), &w, &det));
    Ok(gram(basis.dim(), rule, |p| basis.values(p), |p| match &constant {
        Some(c) => c.clone(),
        None => pulled_back(&a.eval(&k.map(p)), &w, &det),
    }))
}

/// `S(A(du_i, du_j))`: a form on derivatives, e.g. the stiffness matrix for
/// `s = 0` with `A` acting on gradients.
pub fn local_derivative_matrix(
    basis: &LocalBasis,
    a: &CoefficientTensor,
    k: &AffinePyramid<f64>,
    rule: &PyramidRule<f64>,
) -> Result<ElementMatrix> {
    if basis.s() + 1 != a.s {
        return Err(Error::DimensionMismatch(format!("derivatives of {}-forms with a {}-form coefficient", basis.s(), a.s)));
    }
    let (_, dw) = weights(k, basis.s())?;
    let det = k.det();
    let constant = a.is_constant().then(|| pulled_back(&a.eval(&[0.0; 3]), &dw, &det));
    Ok(gram(basis.dim(), rule, |p| basis.derivatives(p), |p| match &constant {
        Some(c) => c.clone(),
        None => pulled_back(&a.eval(&k.map(p)), &dw, &det),
    }))
}

fn gram(
    n: usize,
    rule: &PyramidRule<f64>,
    values: impl Fn(&[f64; 3]) -> Vec<Vec<f64>>,
    coeff: impl Fn(&[f64; 3]) -> Vec<Vec<f64>>,
) -> ElementMatrix {
    let mut m = DMatrix::zeros(n, n);
    for (p, &wt) in rule.points.iter().zip(&rule.weights) {
        let v = values(p);
        let c = coeff(p);
        let av: Vec<Vec<f64>> =
            v.iter().map(|vj| c.iter().map(|r| r.iter().zip(vj).map(|(a, b)| a * b).sum()).collect()).collect();
        for i in 0..n {
            for j in i..n {
                let e: f64 = v[i].iter().zip(&av[j]).map(|(a, b)| a * b).sum();
                m[(i, j)] += wt * e;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

/// Exact integrals `int_{K^} (u_i)_a (u_j)_b` of reference proxies, one
/// matrix per component pair `(a, b)`.
pub fn reference_products(basis: &SpaceBasis) -> Result<Vec<Vec<ExactMatrix>>> {
    use std::collections::BTreeMap;
    let n = component_count(basis.s);
    let hats: Vec<Vec<_>> = basis.basis.iter().map(|f| f.pullback_components()).collect();
    // integrals of products of monomials depend only on the summed exponents
    let mut table: BTreeMap<(u32, u32, i64), Rational> = BTreeMap::new();
    let mut out = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut m = vec![vec![Rational::zero(); hats.len()]; hats.len()];
            for i in 0..hats.len() {
                for j in 0..hats.len() {
                    if a == b && j < i {
                        m[i][j] = m[j][i].clone();
                        continue;
                    }
                    let mut acc = Rational::zero();
                    for (mi, vi) in hats[i][a].terms() {
                        for (mj, vj) in hats[j][b].terms() {
                            let key = (mi.a + mj.a, mi.b + mj.b, mi.c + mj.c);
                            let v = match table.get(&key) {
                                Some(v) => v.clone(),
                                None => {
                                    let v = crate::RationalPoly::monomial(key.0, key.1, key.2).integrate_reference()?;
                                    table.insert(key, v.clone());
                                    v
                                }
                            };
                            acc += vi * vj * v;
                        }
                    }
                    m[i][j] = acc;
                }
            }
            out[a][b] = m;
        }
    }
    Ok(out)
}

/// Exact `int_K A(u_i, u_j)` for constant rational `A` on an exact affine
/// pyramid, from precomputed [`reference_products`] of an `s`-form basis.
pub fn analytic_with_products(
    s: usize,
    products: &[Vec<ExactMatrix>],
    a: &[Vec<Rational>],
    k: &AffinePyramid<Rational>,
) -> Result<ExactMatrix> {
    let nc = component_count(s);
    if products.len() != nc || a.len() != nc || a.iter().any(|r| r.len() != nc) {
        return Err(Error::DimensionMismatch(format!("coefficient or products do not fit {s}-forms")));
    }
    let ahat = pulled_back(a, &k.affine_weight(s)?, &k.det());
    let n = products[0][0].len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for (al, row) in ahat.iter().enumerate() {
        for (be, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o_row, p_row) in out.iter_mut().zip(&products[al][be]) {
                for (o, p) in o_row.iter_mut().zip(p_row) {
                    *o += c * p;
                }
            }
        }
    }
    Ok(out)
}

/// Exact element matrix of a constant coefficient, the oracle for the
/// quadrature matrix.
pub fn analytic_bilinear_matrix(
    basis: &SpaceBasis,
    a: &[Vec<Rational>],
    k: &AffinePyramid<Rational>,
) -> Result<ExactMatrix> {
    analytic_with_products(basis.s, &reference_products(basis)?, a, k)
}
