//! Gauss rules on `[0, 1]` and the conical product rule on the reference
//! pyramid.
//!
//! The pyramid rule collapses a cube onto the pyramid: two Gauss-Legendre
//! axes for the square sections and a Gauss-Jacobi axis with weight
//! `(1 - t)^2` that absorbs the shrinking section area.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffinePyramid, Vec3};
use crate::ratpoly::RationalPoly;
use crate::scalar::Real;

const MAX_QL_SWEEPS: usize = 60;

/// A one-dimensional rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule1D<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule1D<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(T) -> T) -> T {
        let terms: Vec<T> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// Recursive pairwise sum; the split points depend only on the length, so the
/// result is reproducible.
pub fn pairwise_sum<T: Real>(v: &[T]) -> T {
    if v.len() <= 8 {
        return v.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Implicit QL on a symmetric tridiagonal matrix.
///
/// `diag` is overwritten with eigenvalues; the returned vector holds the first
/// component of each normalized eigenvector, which is all Golub-Welsch needs.
fn tridiagonal_eigen<T: Real>(diag: &mut [T], off: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut e: Vec<T> = off.iter().copied().chain(std::iter::once(T::zero())).take(n).collect();
    e.resize(n, T::zero());
    let mut z = vec![T::zero(); n];
    z[0] = T::one();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Convergence);
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] = diag[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            diag[l] = diag[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(z)
}

/// Golub-Welsch on `[-1, 1]` recurrence data, mapped to `[0, 1]`.
fn golub_welsch<T: Real>(mut diag: Vec<T>, off: Vec<T>, mu0: T) -> Result<Rule1D<T>> {
    let first = tridiagonal_eigen(&mut diag, &off)?;
    let half = T::lit(0.5);
    let mut pairs: Vec<(T, T)> = diag
        .iter()
        .zip(&first)
        .map(|(&x, &v)| ((x + T::one()) * half, mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(Rule1D { nodes, weights })
}

/// Diagonal and off-diagonal entries of the Jacobi matrix for `P^{(alpha,beta)}`
/// on `[-1, 1]`, weight `(1-x)^alpha (1+x)^beta`.
pub fn jacobi_recurrence<T: Real>(n: usize, alpha: T, beta: T) -> (Vec<T>, Vec<T>) {
    let two = T::lit(2.0);
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|i| {
            let k = T::lit(i as f64);
            let s = two * k + ab;
            if i == 0 {
                (beta - alpha) / (ab + two)
            } else {
                (beta * beta - alpha * alpha) / (s * (s + two))
            }
        })
        .collect();
    let off = (1..n)
        .map(|i| {
            let k = T::lit(i as f64);
            let s = two * k + ab;
            let num = T::lit(4.0) * k * (k + alpha) * (k + beta) * (k + ab);
            let den = s * s * (s + T::one()) * (s - T::one());
            (num / den).sqrt()
        })
        .collect();
    (diag, off)
}

/// `n`-point Gauss-Legendre rule on `[0, 1]`, exact through degree `2n - 1`.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<Rule1D<T>> {
    if n == 0 {
        return Err(Error::Config("a rule needs at least one point".into()));
    }
    let (diag, off) = jacobi_recurrence(n, T::zero(), T::zero());
    golub_welsch(diag, off, T::one())
}

/// `n`-point Gauss-Jacobi rule on `[0, 1]` for the weight `(1 - t)^2`.
///
/// Integrates `(1-t)^2 h(t)` exactly for `h` of degree up to `2n - 1`; the
/// weights sum to `1/3`.
pub fn gauss_jacobi20<T: Real>(n: usize) -> Result<Rule1D<T>> {
    if n == 0 {
        return Err(Error::Config("a rule needs at least one point".into()));
    }
    let (diag, off) = jacobi_recurrence(n, T::lit(2.0), T::zero());
    golub_welsch(diag, off, T::one() / T::lit(3.0))
}

/// Points and weights on the reference pyramid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PyramidRule<T> {
    pub order: usize,
    pub points: Vec<Vec3<T>>,
    pub weights: Vec<T>,
}

/// Conical product rule of order `k`: `(k+1)^3` points, exact on every
/// `x^a y^b (1+z)^-c` with `a, b, c <= 2k + 1`.
pub fn conical_rule<T: Real>(k: usize) -> Result<PyramidRule<T>> {
    let gl = gauss_legendre::<T>(k + 1)?;
    let gj = gauss_jacobi20::<T>(k + 1)?;
    let mut points = Vec::with_capacity(gl.len() * gl.len() * gj.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&zeta, &mu) in gj.nodes.iter().zip(&gj.weights) {
        let t = T::one() - zeta;
        for (&xi, &li) in gl.nodes.iter().zip(&gl.weights) {
            for (&eta, &lj) in gl.nodes.iter().zip(&gl.weights) {
                points.push([xi * t, eta * t, zeta]);
                weights.push(li * lj * mu);
            }
        }
    }
    Ok(PyramidRule { order: k, points, weights })
}

/// Rule for a Gram matrix of order-`k` forms of degree `s`.
///
/// For `s = 3` products lose a degree in each variable, so `reduced` selects
/// the order `k - 1` rule.
pub fn rule_for_pair<T: Real>(k: usize, s: usize, reduced: bool) -> Result<PyramidRule<T>> {
    if reduced && s == 3 && k >= 1 {
        conical_rule(k - 1)
    } else {
        conical_rule(k)
    }
}

impl<T: Real> PyramidRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rule value for a function of reference coordinates.
    pub fn apply(&self, f: impl Fn(&Vec3<T>) -> T) -> T {
        let terms: Vec<T> = self.points.iter().zip(&self.weights).map(|(p, &w)| w * f(p)).collect();
        pairwise_sum(&terms)
    }

    /// `S_{k,K}(f)` for a function of physical coordinates.
    pub fn integrate_on_pyramid(&self, k: &AffinePyramid<T>, f: impl Fn(&Vec3<T>) -> T) -> T {
        k.det().abs() * self.apply(|p| f(&k.map(p)))
    }
}

impl PyramidRule<f64> {
    /// Rule value of the finite realization of `p`, scaled by `|det J_K|`.
    pub fn integrate_poly(&self, p: &RationalPoly, k: &AffinePyramid<f64>) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.len());
        for (pt, &w) in self.points.iter().zip(&self.weights) {
            terms.push(w * p.evaluate_reference(*pt)?);
        }
        Ok(k.det().abs() * pairwise_sum(&terms))
    }

    /// `E_{k,K}(p) = S_{k,K}(p) - int_K p`, with `p` given on the reference
    /// pyramid.
    pub fn quad_error(&self, p: &RationalPoly, k: &AffinePyramid<f64>) -> Result<f64> {
        use num_traits::ToPrimitive;
        let exact = p.integrate_reference()?.to_f64().unwrap_or(f64::NAN);
        Ok(self.integrate_poly(p, k)? - k.det().abs() * exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::int;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn legendre_small() {
        let r = gauss_legendre::<f64>(1).unwrap();
        assert!(close(r.nodes[0], 0.5, 1e-15) && close(r.weights[0], 1.0, 1e-15));
        let r = gauss_legendre::<f64>(2).unwrap();
        let d = 0.5 / 3f64.sqrt();
        assert!(close(r.nodes[0], 0.5 - d, 1e-15) && close(r.nodes[1], 0.5 + d, 1e-15));
        assert!(close(r.weights[0], 0.5, 1e-15) && close(r.weights[1], 0.5, 1e-15));
        let r = gauss_legendre::<f64>(3).unwrap();
        assert!(close(r.apply(|t| t.powi(5)), 1.0 / 6.0, 1e-15));
    }

    #[test]
    fn jacobi_small() {
        let r = gauss_jacobi20::<f64>(1).unwrap();
        assert!(close(r.nodes[0], 0.25, 1e-15) && close(r.weights[0], 1.0 / 3.0, 1e-15));
        let r = gauss_jacobi20::<f64>(2).unwrap();
        assert!(close(r.apply(|t| t.powi(3)), 1.0 / 60.0, 1e-15));
        for n in 1..=64 {
            let r = gauss_jacobi20::<f64>(n).unwrap();
            assert!(close(r.weights.iter().sum(), 1.0 / 3.0, 1e-14), "n={n}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes.iter().all(|&t| t > 0.0 && t < 1.0));
        }
    }

    #[test]
    fn jacobi_exactness() {
        // int_0^1 (1-t)^2 t^j dt = 2 / ((j+1)(j+2)(j+3))
        for n in 1..=12 {
            let r = gauss_jacobi20::<f64>(n).unwrap();
            for j in 0..2 * n {
                let exact = 2.0 / ((j + 1) * (j + 2) * (j + 3)) as f64;
                assert!(close(r.apply(|t| t.powi(j as i32)), exact, 1e-13), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn nodes_are_recurrence_roots() {
        for n in 1..=16 {
            let r = gauss_jacobi20::<f64>(n).unwrap();
            let (diag, off) = jacobi_recurrence::<f64>(n, 2.0, 0.0);
            for &t in &r.nodes {
                let x = 2.0 * t - 1.0;
                // orthonormal recurrence keeps values of order one
                let (mut prev, mut cur) = (0.0, 1.0);
                for j in 0..n {
                    let b_prev = if j == 0 { 0.0 } else { off[j - 1] };
                    let b_next = if j + 1 < n { off[j] } else { 1.0 };
                    let next = ((x - diag[j]) * cur - b_prev * prev) / b_next;
                    prev = cur;
                    cur = next;
                }
                assert!(cur.abs() <= 1e-12, "n={n} residual {cur}");
            }
        }
    }

    #[test]
    fn single_precision() {
        let r = gauss_jacobi20::<f32>(6).unwrap();
        assert!((r.weights.iter().sum::<f32>() - 1.0 / 3.0).abs() < 1e-6);
        let rule = conical_rule::<f32>(2).unwrap();
        assert!((rule.weights.iter().sum::<f32>() - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn order_zero_rule() {
        let rule = conical_rule::<f64>(0).unwrap();
        assert_eq!(rule.len(), 1);
        let [x, y, z] = rule.points[0];
        assert!(close(x, 0.375, 1e-15) && close(y, 0.375, 1e-15) && close(z, 0.25, 1e-15));
        assert!(close(rule.weights[0], 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn rule_points_inside() {
        for k in 0..6 {
            let rule = conical_rule::<f64>(k).unwrap();
            assert_eq!(rule.len(), (k + 1).pow(3));
            assert!(close(rule.weights.iter().sum(), 1.0 / 3.0, 1e-14));
            for &[x, y, z] in &rule.points {
                assert!(z > 0.0 && z < 1.0 && x > 0.0 && y > 0.0 && x < 1.0 - z && y < 1.0 - z);
            }
        }
    }

    #[test]
    fn exact_on_sample_monomial() {
        let rule = conical_rule::<f64>(1).unwrap();
        let p = RationalPoly::monomial(3, 3, 3);
        let exact = p.integrate_reference().unwrap();
        assert_eq!(exact, int(1) / int(96));
        let k = AffinePyramid::reference();
        assert!(rule.quad_error(&p, &k).unwrap().abs() <= 1e-14);
    }

    #[test]
    fn beyond_legendre_degree_is_inexact() {
        for k in 0..4 {
            let rule = conical_rule::<f64>(k).unwrap();
            let p = RationalPoly::monomial(2 * k as u32 + 2, 0, 2 * k as i64 + 2);
            let err = rule.quad_error(&p, &AffinePyramid::reference()).unwrap();
            assert!(err.abs() > 1e-8, "k={k} err={err}");
        }
    }

    #[test]
    fn separable_structure() {
        let k = 2;
        let rule = conical_rule::<f64>(k).unwrap();
        let gl = gauss_legendre::<f64>(k + 1).unwrap();
        let gj = gauss_jacobi20::<f64>(k + 1).unwrap();
        for (a, b, c) in [(3, 1, 5), (6, 2, 7), (0, 7, 9), (5, 5, 1)] {
            let p = RationalPoly::monomial(a, b, c);
            let s = rule.integrate_poly(&p, &AffinePyramid::reference()).unwrap();
            let prod = gl.apply(|t| t.powi(a as i32))
                * gl.apply(|t| t.powi(b as i32))
                * gj.apply(|t| (1.0 - t).powi(c as i32));
            assert!(close(s, prod, 1e-14));
            let e1 = gl.apply(|t| t.powi(a as i32)) - 1.0 / (a as f64 + 1.0);
            // the one-dimensional errors vanish inside the exactness range
            if a as usize <= 2 * k + 1 {
                assert!(e1.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn affine_covariance() {
        let k = AffinePyramid::new([0.3, -0.2, 0.1], [1.2, 0.1, 0.0], [-0.3, 0.9, 0.2], [0.5, 0.4, 1.3]).unwrap();
        let rule = conical_rule::<f64>(3).unwrap();
        let f = |x: &Vec3<f64>| (x[0] + 2.0 * x[1]).sin() * (1.0 + x[2] * x[2]);
        let phys = rule.integrate_on_pyramid(&k, f);
        let refd = k.det().abs() * rule.apply(|p| f(&k.map(p)));
        assert!(close(phys, refd, 1e-14));
        let one = rule.integrate_on_pyramid(&k, |_| 1.0);
        assert!(close(one, k.det() / 3.0, 1e-14));
    }

    #[test]
    fn reduced_flag() {
        assert_eq!(rule_for_pair::<f64>(3, 3, true).unwrap().order, 2);
        assert_eq!(rule_for_pair::<f64>(3, 2, true).unwrap().order, 3);
    }
}
