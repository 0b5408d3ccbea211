//! Reference and infinite pyramid coordinates, affine pyramids and pullback
//! weights.
//!
//! The reference pyramid is `{0 <= zeta <= 1, 0 <= xi, eta <= 1 - zeta}` with
//! base square at `zeta = 0` and apex `(0, 0, 1)`. The projective map
//! `(x, y, z) -> (x, y, z) / (1 + z)` identifies it with the infinite pyramid
//! `[0,1]^2 x [0, inf)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratpoly::{Axis, RationalPoly};
use crate::scalar::{Field, Real};

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];

/// Reference-coordinate vertices: four base corners, then the apex.
pub const REFERENCE_VERTICES: [[i64; 3]; 5] =
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1]];

/// Parallelogram-based pyramid, the affine image of the reference pyramid.
///
/// Stored as the image `v0` of the base corner `(0,0,0)`, the images `e1`,
/// `e2` of the two base directions, and the apex. The base is a parallelogram
/// by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePyramid<T> {
    pub v0: Vec3<T>,
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
    pub apex: Vec3<T>,
}

fn sub<T: Field>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0].clone() - b[0].clone(), a[1].clone() - b[1].clone(), a[2].clone() - b[2].clone()]
}

pub fn det3<T: Field>(m: &Mat3<T>) -> T {
    let c = |i: usize, j: usize| m[i][j].clone();
    c(0, 0) * (c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1)) - c(0, 1) * (c(1, 0) * c(2, 2) - c(1, 2) * c(2, 0))
        + c(0, 2) * (c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0))
}

/// Inverse of a 3x3 matrix by cofactors.
pub fn inv3<T: Field>(m: &Mat3<T>) -> Result<Mat3<T>> {
    let d = det3(m);
    if d.is_zero() {
        return Err(Error::Degenerate);
    }
    let c = |i: usize, j: usize| m[i][j].clone();
    let cof = |i0: usize, i1: usize, j0: usize, j1: usize| c(i0, j0) * c(i1, j1) - c(i0, j1) * c(i1, j0);
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    Ok(adj.map(|row| row.map(|v| v / d.clone())))
}

pub fn transpose<T: Clone>(m: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

pub fn matmul<T: Field>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(T::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
    })
}

pub fn matvec<T: Field>(a: &Mat3<T>, v: &Vec3<T>) -> Vec3<T> {
    std::array::from_fn(|i| (0..3).fold(T::zero(), |acc, k| acc + a[i][k].clone() * v[k].clone()))
}

impl<T: Field> AffinePyramid<T> {
    pub fn new(v0: Vec3<T>, e1: Vec3<T>, e2: Vec3<T>, apex: Vec3<T>) -> Result<Self> {
        let k = Self { v0, e1, e2, apex };
        if k.det() <= T::zero() || k.det().is_negligible() {
            return Err(Error::Degenerate);
        }
        Ok(k)
    }

    pub fn reference() -> Self {
        let z = || T::zero();
        let o = || T::one();
        Self { v0: [z(), z(), z()], e1: [o(), z(), z()], e2: [z(), o(), z()], apex: [z(), z(), o()] }
    }

    /// Reference pyramid scaled by `h` about the origin.
    pub fn scaled(h: T) -> Self {
        let z = || T::zero();
        Self {
            v0: [z(), z(), z()],
            e1: [h.clone(), z(), z()],
            e2: [z(), h.clone(), z()],
            apex: [z(), z(), h],
        }
    }

    /// Constant Jacobian `[e1 | e2 | apex - v0]`, indexed `[row][col]`.
    pub fn jacobian(&self) -> Mat3<T> {
        let a = sub(&self.apex, &self.v0);
        std::array::from_fn(|i| [self.e1[i].clone(), self.e2[i].clone(), a[i].clone()])
    }

    pub fn det(&self) -> T {
        det3(&self.jacobian())
    }

    pub fn inverse_jacobian(&self) -> Result<Mat3<T>> {
        inv3(&self.jacobian())
    }

    /// `v0 + xi e1 + eta e2 + zeta (apex - v0)`.
    pub fn map(&self, p: &Vec3<T>) -> Vec3<T> {
        let j = self.jacobian();
        let d = matvec(&j, p);
        std::array::from_fn(|i| self.v0[i].clone() + d[i].clone())
    }

    /// Reference coordinates of a physical point.
    pub fn inverse_map(&self, x: &Vec3<T>) -> Result<Vec3<T>> {
        Ok(matvec(&self.inverse_jacobian()?, &sub(x, &self.v0)))
    }

    /// Physical vertices in reference order (base corners, then apex).
    pub fn vertices(&self) -> [Vec3<T>; 5] {
        REFERENCE_VERTICES.map(|v| self.map(&v.map(T::from_int)))
    }

    /// Constant weight `W` with physical proxy = `W` * reference proxy.
    ///
    /// `s = 0`: 1; `s = 1`: `J^{-T}`; `s = 2`: `J / |J|`; `s = 3`: `1 / |J|`.
    pub fn affine_weight(&self, s: usize) -> Result<Vec<Vec<T>>> {
        let j = self.jacobian();
        let d = self.det();
        Ok(match s {
            0 => vec![vec![T::one()]],
            1 => transpose(&inv3(&j)?).iter().map(|r| r.to_vec()).collect(),
            2 => j.iter().map(|r| r.iter().map(|v| v.clone() / d.clone()).collect()).collect(),
            3 => vec![vec![T::one() / d]],
            _ => return Err(Error::Degree(s)),
        })
    }

    /// Converts the scalar type, e.g. exact to floating.
    pub fn map_scalar<U>(&self, f: impl Fn(&T) -> U) -> AffinePyramid<U> {
        AffinePyramid {
            v0: [f(&self.v0[0]), f(&self.v0[1]), f(&self.v0[2])],
            e1: [f(&self.e1[0]), f(&self.e1[1]), f(&self.e1[2])],
            e2: [f(&self.e2[0]), f(&self.e2[1]), f(&self.e2[2])],
            apex: [f(&self.apex[0]), f(&self.apex[1]), f(&self.apex[2])],
        }
    }
}

/// Shape-regularity parameters: `||J|| <= h` and `||J^{-1}|| <= rho / h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams<T> {
    pub h: T,
    pub rho: T,
}

/// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Real>(mut a: Mat3<T>) -> Vec3<T> {
    let two = T::lit(2.0);
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        let scale = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
        if off <= T::epsilon() * scale * T::lit(1e-3) || off == T::zero() {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            let mut r = [[T::zero(); 3]; 3];
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = T::one();
            }
            r[p][p] = c;
            r[q][q] = c;
            r[p][q] = s;
            r[q][p] = -s;
            a = matmul(&matmul(&transpose(&r), &a), &r);
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

/// Spectral norm via the largest eigenvalue of `M^T M`.
pub fn spectral_norm<T: Real>(m: &Mat3<T>) -> T {
    let mtm = matmul(&transpose(m), m);
    symmetric_eigenvalues(mtm).into_iter().fold(T::zero(), |a, b| a.max(b)).sqrt()
}

impl<T: Real> AffinePyramid<T> {
    pub fn shape_params(&self) -> Result<ShapeParams<T>> {
        let j = self.jacobian();
        let inv = inv3(&j)?;
        let h = spectral_norm(&j);
        Ok(ShapeParams { h, rho: h * spectral_norm(&inv) })
    }

    pub fn volume(&self) -> T {
        self.det().abs() / T::lit(3.0)
    }
}

/// Pullback weights of the projective map together with their exact inverses.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub s: usize,
    /// Reference proxy (at `phi(x)`) = `forward` * infinite-pyramid proxy.
    pub forward: Vec<Vec<RationalPoly>>,
    pub inverse: Vec<Vec<RationalPoly>>,
}

/// `(1+z)^n` as a rational monomial.
fn one_plus_z(n: i64) -> RationalPoly {
    RationalPoly::monomial(0, 0, -n)
}

/// `coeff * x^a y^b (1+z)^n`.
fn mono(coeff: i64, a: u32, b: u32, n: i64) -> RationalPoly {
    RationalPoly::monomial(a, b, -n).scale(&crate::ratpoly::int(coeff))
}

/// Symbolic weights `w^(s)` of the projective map and their inverses.
pub fn infinite_weight(s: usize) -> Result<WeightMatrix> {
    let z = RationalPoly::zero;
    let (forward, inverse) = match s {
        0 => (vec![vec![RationalPoly::one()]], vec![vec![RationalPoly::one()]]),
        1 => (
            vec![
                vec![one_plus_z(1), z(), z()],
                vec![z(), one_plus_z(1), z()],
                vec![mono(1, 1, 0, 1), mono(1, 0, 1, 1), one_plus_z(2)],
            ],
            vec![
                vec![one_plus_z(-1), z(), z()],
                vec![z(), one_plus_z(-1), z()],
                vec![mono(-1, 1, 0, -2), mono(-1, 0, 1, -2), one_plus_z(-2)],
            ],
        ),
        2 => (
            vec![
                vec![one_plus_z(3), z(), mono(-1, 1, 0, 2)],
                vec![z(), one_plus_z(3), mono(-1, 0, 1, 2)],
                vec![z(), z(), one_plus_z(2)],
            ],
            vec![
                vec![one_plus_z(-3), z(), mono(1, 1, 0, -3)],
                vec![z(), one_plus_z(-3), mono(1, 0, 1, -3)],
                vec![z(), z(), one_plus_z(-2)],
            ],
        ),
        3 => (vec![vec![one_plus_z(4)]], vec![vec![one_plus_z(-4)]]),
        _ => return Err(Error::Degree(s)),
    };
    Ok(WeightMatrix { s, forward, inverse })
}

/// Product of two matrices of rational polynomials.
pub fn poly_matmul(a: &[Vec<RationalPoly>], b: &[Vec<RationalPoly>]) -> Vec<Vec<RationalPoly>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter().zip(b).fold(RationalPoly::zero(), |acc, (aik, bk)| acc + aik * &bk[j])
                })
                .collect()
        })
        .collect()
}

pub fn poly_matvec(a: &[Vec<RationalPoly>], v: &[RationalPoly]) -> Vec<RationalPoly> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(RationalPoly::zero(), |acc, (aij, vj)| acc + aij * vj))
        .collect()
}

/// Jacobian of the projective map in infinite-pyramid coordinates, computed
/// by differentiating its components.
pub fn projective_jacobian() -> Vec<Vec<RationalPoly>> {
    let comps = [
        RationalPoly::monomial(1, 0, 1),
        RationalPoly::monomial(0, 1, 1),
        &RationalPoly::one() - &RationalPoly::monomial(0, 0, 1),
    ];
    comps
        .iter()
        .map(|c| Axis::ALL.iter().map(|&ax| c.partial_derivative(ax)).collect())
        .collect()
}

pub fn poly_det3(m: &[Vec<RationalPoly>]) -> RationalPoly {
    let c = |i: usize, j: usize| &m[i][j];
    let minor = |i0: usize, i1: usize, j0: usize, j1: usize| &(c(i0, j0) * c(i1, j1)) - &(c(i0, j1) * c(i1, j0));
    let t0 = c(0, 0) * &minor(1, 2, 1, 2);
    let t1 = c(0, 1) * &minor(1, 2, 0, 2);
    let t2 = c(0, 2) * &minor(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}
