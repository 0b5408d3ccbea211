//! Projection-based interpolation.
//!
//! The interpolant is the solution of one square system whose rows are, in
//! order: vertex values (`s = 0`), edge projections, face projections and
//! interior projections. Each group only sees traces on its own entity, so
//! the system is block triangular and adjacent elements produce the same
//! traces on a shared entity. All inner products use the physical metric.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{matvec, AffinePyramid, Vec3};
use crate::linalg::{independent_subset, nullspace, SparseVec};
use crate::quadrature::{conical_rule, gauss_legendre, PyramidRule};
use crate::ratpoly::FloatPoly;
use crate::Rational;
use num_traits::{One, Zero};
use crate::spaces::{basis, face_trace, Coords, Face, FacePoly, Family, FormPoly, SpaceBasis};

use super::local::{apply_weight, weights};
use super::{FormField, LocalBasis};

/// Extra points per direction beyond the order, so that the projections of
/// smooth fields are integrated well below the tested tolerances.
const EXTRA_POINTS: usize = 8;

/// Floating polynomial in face parameters.
#[derive(Debug, Clone, Default)]
struct Poly2(Vec<(i32, i32, f64)>);

impl Poly2 {
    fn from_exact(p: &FacePoly) -> Self {
        use num_traits::ToPrimitive;
        Self(p.iter().map(|(&(i, j), v)| (i as i32, j as i32, v.to_f64().unwrap_or(f64::NAN))).collect())
    }

    fn eval(&self, [p, q]: [f64; 2]) -> f64 {
        self.0.iter().map(|&(i, j, c)| c * p.powi(i) * q.powi(j)).sum()
    }

    fn dp(&self, [p, q]: [f64; 2]) -> f64 {
        self.0.iter().filter(|t| t.0 > 0).map(|&(i, j, c)| c * i as f64 * p.powi(i - 1) * q.powi(j)).sum()
    }

    fn dq(&self, [p, q]: [f64; 2]) -> f64 {
        self.0.iter().filter(|t| t.1 > 0).map(|&(i, j, c)| c * j as f64 * p.powi(i) * q.powi(j - 1)).sum()
    }
}

fn face_rule(face: Face, n: usize) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
    let gl = gauss_legendre::<f64>(n)?;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (&a, &wa) in gl.nodes.iter().zip(&gl.weights) {
        for (&b, &wb) in gl.nodes.iter().zip(&gl.weights) {
            if face.is_triangle() {
                pts.push([a * (1.0 - b), b]);
                wts.push(wa * wb * (1.0 - b));
            } else {
                pts.push([a, b]);
                wts.push(wa * wb);
            }
        }
    }
    Ok((pts, wts))
}

fn frame_f64(face: Face) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (o, tp, tq) = face.frame();
    (o.map(|v| v as f64), tp.map(|v| v as f64), tq.map(|v| v as f64))
}

fn face_point(face: Face, [p, q]: [f64; 2]) -> Vec3<f64> {
    let (o, tp, tq) = frame_f64(face);
    std::array::from_fn(|i| o[i] + p * tp[i] + q * tq[i])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &Vec3<f64>, b: &Vec3<f64>) -> Vec3<f64> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Reference vertices as `(face, parameter)` pairs, in reference order.
const VERTICES: [(Face, [f64; 2]); 5] = [
    (Face::Eta0, [0.0, 0.0]),
    (Face::Eta0, [1.0, 0.0]),
    (Face::Eta1, [1.0, 0.0]),
    (Face::Eta1, [0.0, 0.0]),
    (Face::Eta0, [0.0, 1.0]),
];

/// Edges as segments in the parameters of a containing triangle.
const EDGES: [(Face, [f64; 2], [f64; 2]); 8] = [
    (Face::Eta0, [0.0, 0.0], [1.0, 0.0]),
    (Face::Xi1, [0.0, 0.0], [1.0, 0.0]),
    (Face::Eta1, [0.0, 0.0], [1.0, 0.0]),
    (Face::Xi0, [0.0, 0.0], [1.0, 0.0]),
    (Face::Eta0, [0.0, 0.0], [0.0, 1.0]),
    (Face::Eta0, [1.0, 0.0], [0.0, 1.0]),
    (Face::Eta1, [1.0, 0.0], [0.0, 1.0]),
    (Face::Eta1, [0.0, 0.0], [0.0, 1.0]),
];

/// Scalar face bubbles of order `k`: `P_k` on triangles, `Q_k` on the base.
fn face_bubbles(face: Face, k: usize) -> Vec<Poly2> {
    let k = k as i32;
    let mut out = Vec::new();
    if face.is_triangle() {
        for i in 0..=k - 3 {
            for j in 0..=k - 3 - i {
                // p q (1 - p - q) p^i q^j
                out.push(Poly2(vec![(i + 1, j + 1, 1.0), (i + 2, j + 1, -1.0), (i + 1, j + 2, -1.0)]));
            }
        }
    } else {
        for i in 0..=k - 2 {
            for j in 0..=k - 2 {
                // p (1 - p) q (1 - q) p^i q^j
                out.push(Poly2(vec![
                    (i + 1, j + 1, 1.0),
                    (i + 2, j + 1, -1.0),
                    (i + 1, j + 2, -1.0),
                    (i + 2, j + 2, 1.0),
                ]));
            }
        }
    }
    out
}

/// Face densities of order `m` (`P_m` or `Q_m`), optionally without constants
/// and shifted to mean zero.
fn face_densities(face: Face, m: usize, mean_zero: bool) -> Vec<Poly2> {
    let m = m as i32;
    let mut out = Vec::new();
    for i in 0..=m {
        for j in 0..=m {
            if face.is_triangle() && i + j > m {
                continue;
            }
            if mean_zero && i + j == 0 {
                continue;
            }
            let mut terms = vec![(i, j, 1.0)];
            if mean_zero {
                // means of p^i q^j over the unit triangle (area 1/2) or square
                let mean = if face.is_triangle() {
                    2.0 * factorial(i) * factorial(j) / factorial(i + j + 2)
                } else {
                    1.0 / ((i + 1) * (j + 1)) as f64
                };
                terms.push((0, 0, -mean));
            }
            out.push(Poly2(terms));
        }
    }
    out
}

fn factorial(n: i32) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Coefficient vectors of a basis of the members of `space` with vanishing
/// traces on every face.
pub(crate) fn bubble_coefficients(space: &SpaceBasis) -> Result<Vec<Vec<Rational>>> {
    if space.s == 3 {
        return Ok((0..space.dim())
            .map(|i| (0..space.dim()).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect());
    }
    let mut index: BTreeMap<(Face, usize, u32, u32), usize> = BTreeMap::new();
    let mut cols = Vec::with_capacity(space.dim());
    for f in &space.basis {
        let mut col = SparseVec::new();
        for face in Face::ALL {
            for (c, poly) in face_trace(f, face)?.iter().enumerate() {
                for (&(i, j), v) in poly {
                    let n = index.len();
                    col.insert(*index.entry((face, c, i, j)).or_insert(n), v.clone());
                }
            }
        }
        cols.push(col);
    }
    Ok(nullspace(&cols))
}

fn bubbles(space: &SpaceBasis) -> Result<Vec<FormPoly>> {
    Ok(bubble_coefficients(space)?.iter().map(|y| FormPoly::combine(space.s, &space.basis, y)).collect())
}

/// Members of `forms` whose derivatives are linearly independent.
fn independent_derivatives(forms: &[FormPoly]) -> Result<Vec<FormPoly>> {
    let ds = forms.iter().map(FormPoly::exterior_derivative).collect::<Result<Vec<_>>>()?;
    let mut coords = Coords::new();
    let keep = independent_subset(&coords.vectors(&ds));
    Ok(keep.into_iter().map(|i| forms[i].clone()).collect())
}

fn float_pullback(f: &FormPoly) -> Vec<FloatPoly> {
    f.pullback_components().iter().map(|p| p.to_float()).collect()
}

/// Interior test functions: `derivative` rows pair `d(v - u)` with the test,
/// others pair `v - u`.
struct InteriorTests {
    derivative: Vec<Vec<FloatPoly>>,
    value: Vec<Vec<FloatPoly>>,
}

fn interior_tests(s: usize, k: usize, family: Family) -> Result<InteriorTests> {
    let own = basis(s, k, family)?;
    let d_of = |forms: Vec<FormPoly>| -> Result<Vec<Vec<FloatPoly>>> {
        forms.iter().map(|f| Ok(float_pullback(&f.exterior_derivative()?))).collect()
    };
    Ok(match s {
        0 => InteriorTests { derivative: d_of(bubbles(&own)?)?, value: vec![] },
        1 => InteriorTests {
            derivative: d_of(independent_derivatives(&bubbles(&own)?)?)?,
            value: d_of(bubbles(&*basis(0, k, family)?)?)?,
        },
        2 => InteriorTests {
            derivative: d_of(independent_derivatives(&bubbles(&own)?)?)?,
            value: d_of(independent_derivatives(&bubbles(&*basis(1, k, family)?)?)?)?,
        },
        _ => InteriorTests { derivative: vec![], value: own.basis.iter().map(float_pullback).collect() },
    })
}

/// Basis data tabulated at the edge nodes of one edge.
struct EdgeTable {
    points: Vec<Vec3<f64>>,
    params: Vec<f64>,
    weights: Vec<f64>,
    tangent: Vec3<f64>,
    /// `[node][function]`: tangential derivative (`s = 0`) or tangential
    /// component (`s = 1`) of the trace.
    basis: Vec<Vec<f64>>,
}

struct FaceTable {
    face: Face,
    points: Vec<Vec3<f64>>,
    weights: Vec<f64>,
    /// `[node][function][component]`: the face gradient of the trace
    /// (`s = 0`), the tangential components (`s = 1`) or the density (`s = 2`).
    basis: Vec<Vec<Vec<f64>>>,
    /// `[node][function]`: curl density of the tangential trace (`s = 1`).
    basis_curl: Vec<Vec<f64>>,
    /// Face gradients of scalar bubbles, `[test][node]`.
    grad_tests: Vec<Vec<[f64; 2]>>,
    /// Density tests, `[test][node]`.
    density_tests: Vec<Vec<f64>>,
}

struct InteriorTable {
    rule: PyramidRule<f64>,
    /// `[node][function][component]`.
    values: Vec<Vec<Vec<f64>>>,
    derivatives: Vec<Vec<Vec<f64>>>,
    /// `[test][node][component]`.
    derivative_tests: Vec<Vec<Vec<f64>>>,
    value_tests: Vec<Vec<Vec<f64>>>,
}

/// Tabulated projection-based interpolant for one `(s, k, family)`.
pub struct Interpolator {
    pub basis: Arc<LocalBasis>,
    /// `[vertex][function]`, `s = 0` only.
    vertices: Vec<Vec<f64>>,
    edges: Vec<EdgeTable>,
    faces: Vec<FaceTable>,
    interior: InteriorTable,
}

impl Interpolator {
    pub fn new(s: usize, k: usize, family: Family) -> Result<Self> {
        let local = LocalBasis::get(s, k, family)?;
        let space = &local.space;
        let n = local.dim();
        // exact traces, face by face
        let mut traces: HashMap<Face, Vec<Vec<Poly2>>> = HashMap::new();
        if s < 3 {
            for face in Face::ALL {
                let t = space
                    .basis
                    .iter()
                    .map(|f| Ok(face_trace(f, face)?.iter().map(Poly2::from_exact).collect()))
                    .collect::<Result<Vec<Vec<Poly2>>>>()?;
                traces.insert(face, t);
            }
        }
        let vertices = if s == 0 {
            VERTICES.iter().map(|(face, pt)| traces[face].iter().map(|c| c[0].eval(*pt)).collect()).collect()
        } else {
            Vec::new()
        };
        let mut edges = Vec::new();
        if s < 2 {
            let gl = gauss_legendre::<f64>(k + 1 + EXTRA_POINTS)?;
            for (face, a, b) in EDGES {
                let dir = [b[0] - a[0], b[1] - a[1]];
                let (_, tp, tq) = frame_f64(face);
                let tangent = std::array::from_fn(|i| dir[0] * tp[i] + dir[1] * tq[i]);
                let mut points = Vec::new();
                let mut table = Vec::new();
                for &t in &gl.nodes {
                    let pt = [a[0] + t * dir[0], a[1] + t * dir[1]];
                    points.push(face_point(face, pt));
                    table.push(
                        traces[&face]
                            .iter()
                            .map(|c| match s {
                                0 => dir[0] * c[0].dp(pt) + dir[1] * c[0].dq(pt),
                                _ => dir[0] * c[0].eval(pt) + dir[1] * c[1].eval(pt),
                            })
                            .collect(),
                    );
                }
                edges.push(EdgeTable {
                    points,
                    params: gl.nodes.clone(),
                    weights: gl.weights.clone(),
                    tangent,
                    basis: table,
                });
            }
        }
        let mut faces = Vec::new();
        if s < 3 {
            for face in Face::ALL {
                let (pts, wts) = face_rule(face, k + 1 + EXTRA_POINTS)?;
                let tr = &traces[&face];
                let basis_vals = pts
                    .iter()
                    .map(|&pt| {
                        tr.iter()
                            .map(|c| match s {
                                0 => vec![c[0].dp(pt), c[0].dq(pt)],
                                1 => vec![c[0].eval(pt), c[1].eval(pt)],
                                _ => vec![c[0].eval(pt)],
                            })
                            .collect()
                    })
                    .collect();
                let basis_curl = if s == 1 {
                    pts.iter().map(|&pt| tr.iter().map(|c| c[1].dp(pt) - c[0].dq(pt)).collect()).collect()
                } else {
                    Vec::new()
                };
                let grads = if s < 2 { face_bubbles(face, k) } else { Vec::new() };
                let dens = match s {
                    1 => face_densities(face, k - 1, true),
                    2 => face_densities(face, k - 1, false),
                    _ => Vec::new(),
                };
                faces.push(FaceTable {
                    face,
                    points: pts.iter().map(|&pt| face_point(face, pt)).collect(),
                    grad_tests: grads.iter().map(|g| pts.iter().map(|&pt| [g.dp(pt), g.dq(pt)]).collect()).collect(),
                    density_tests: dens.iter().map(|d| pts.iter().map(|&pt| d.eval(pt)).collect()).collect(),
                    weights: wts,
                    basis: basis_vals,
                    basis_curl,
                });
            }
        }
        let tests = interior_tests(s, k, family)?;
        let rule = conical_rule::<f64>(k + EXTRA_POINTS)?;
        let tab = |fs: &[Vec<FloatPoly>]| -> Vec<Vec<Vec<f64>>> {
            fs.iter().map(|f| rule.points.iter().map(|p| f.iter().map(|c| c.eval(*p)).collect()).collect()).collect()
        };
        let interior = InteriorTable {
            values: rule.points.iter().map(|p| local.values(p)).collect(),
            derivatives: rule.points.iter().map(|p| local.derivatives(p)).collect(),
            derivative_tests: tab(&tests.derivative),
            value_tests: tab(&tests.value),
            rule,
        };
        let me = Self { basis: local, vertices, edges, faces, interior };
        if me.row_count() != n {
            return Err(Error::SingularSystem);
        }
        Ok(me)
    }

    /// Cached interpolator for `(s, k, family)`.
    pub fn get(s: usize, k: usize, family: Family) -> Result<Arc<Self>> {
        type Cache = RwLock<HashMap<(usize, usize, Family), Arc<Interpolator>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.read().expect("interpolator cache poisoned").get(&(s, k, family)) {
            return Ok(b.clone());
        }
        let built = Arc::new(Self::new(s, k, family)?);
        let mut w = cache.write().expect("interpolator cache poisoned");
        Ok(w.entry((s, k, family)).or_insert(built).clone())
    }

    fn s(&self) -> usize {
        self.basis.s()
    }

    fn k(&self) -> usize {
        self.basis.k()
    }

    fn row_count(&self) -> usize {
        let edge_rows = match self.s() {
            0 => self.k() - 1,
            1 => self.k(),
            _ => 0,
        };
        self.vertices.len()
            + self.edges.len() * edge_rows
            + self.faces.iter().map(|f| f.grad_tests.len() + f.density_tests.len()).sum::<usize>()
            + self.interior.derivative_tests.len()
            + self.interior.value_tests.len()
    }

    /// Coefficients of the interpolant of `u` on `pyramid`.
    pub fn interpolate(&self, u: &dyn FormField, pyramid: &AffinePyramid<f64>) -> Result<Vec<f64>> {
        let s = self.s();
        if u.degree() != s {
            return Err(Error::DimensionMismatch(format!("interpolating a {}-form into {s}-forms", u.degree())));
        }
        let n = self.basis.dim();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut rhs: Vec<f64> = Vec::with_capacity(n);
        let jac = pyramid.jacobian();
        let phys = |p: &Vec3<f64>| pyramid.map(p);

        for (row, x) in self.vertices.iter().zip(pyramid.vertices()) {
            rows.push(row.clone());
            rhs.push(u.value(&x)[0]);
        }

        for e in &self.edges {
            let t = matvec(&jac, &e.tangent);
            let target: Vec<f64> = e
                .points
                .iter()
                .map(|p| if s == 0 { dot(&u.derivative(&phys(p)), &t) } else { dot(&u.value(&phys(p)), &t) })
                .collect();
            let tests: Vec<Box<dyn Fn(f64) -> f64>> = if s == 0 {
                (1..self.k()).map(|j| Box::new(move |t: f64| t.powi(j as i32) - 1.0 / (j + 1) as f64) as Box<_>).collect()
            } else {
                (0..self.k()).map(|j| Box::new(move |t: f64| t.powi(j as i32)) as Box<_>).collect()
            };
            for test in tests {
                let mut row = vec![0.0; n];
                let mut b = 0.0;
                for (i, (&t, &w)) in e.params.iter().zip(&e.weights).enumerate() {
                    let wt = w * test(t);
                    for (r, v) in row.iter_mut().zip(&e.basis[i]) {
                        *r += wt * v;
                    }
                    b += wt * target[i];
                }
                rows.push(row);
                rhs.push(b);
            }
        }

        for f in &self.faces {
            let (_, tp, tq) = frame_f64(f.face);
            let tp = matvec(&jac, &tp);
            let tq = matvec(&jac, &tq);
            let g = [[dot(&tp, &tp), dot(&tp, &tq)], [dot(&tp, &tq), dot(&tq, &tq)]];
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            let ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
            let normal = cross(&tp, &tq);
            let mut target: Vec<Vec<f64>> = Vec::new();
            let mut target_curl: Vec<f64> = Vec::new();
            for p in &f.points {
                let x = phys(p);
                match s {
                    0 => {
                        let du = u.derivative(&x);
                        target.push(vec![dot(&du, &tp), dot(&du, &tq)]);
                    }
                    1 => {
                        let uv = u.value(&x);
                        target.push(vec![dot(&uv, &tp), dot(&uv, &tq)]);
                        target_curl.push(dot(&u.derivative(&x), &normal));
                    }
                    _ => target.push(vec![dot(&u.value(&x), &normal)]),
                }
            }
            let metric = |a: &[f64], b: &[f64; 2]| {
                a[0] * (ginv[0][0] * b[0] + ginv[0][1] * b[1]) + a[1] * (ginv[1][0] * b[0] + ginv[1][1] * b[1])
            };
            for test in &f.grad_tests {
                let mut row = vec![0.0; n];
                let mut b = 0.0;
                for (i, &w) in f.weights.iter().enumerate() {
                    for (r, v) in row.iter_mut().zip(&f.basis[i]) {
                        *r += w * metric(v, &test[i]);
                    }
                    b += w * metric(&target[i], &test[i]);
                }
                rows.push(row);
                rhs.push(b);
            }
            for test in &f.density_tests {
                let mut row = vec![0.0; n];
                let mut b = 0.0;
                for (i, &w) in f.weights.iter().enumerate() {
                    let wt = w * test[i];
                    if s == 1 {
                        for (r, v) in row.iter_mut().zip(&f.basis_curl[i]) {
                            *r += wt * v;
                        }
                        b += wt * target_curl[i];
                    } else {
                        for (r, v) in row.iter_mut().zip(&f.basis[i]) {
                            *r += wt * v[0];
                        }
                        b += wt * target[i][0];
                    }
                }
                rows.push(row);
                rhs.push(b);
            }
        }

        let (w, dw) = weights(pyramid, s)?;
        let it = &self.interior;
        let mut push_interior = |tests: &[Vec<Vec<f64>>], derivative: bool| {
            let wm = if derivative { &dw } else { &w };
            let table = if derivative { &it.derivatives } else { &it.values };
            let target: Vec<Vec<f64>> = it
                .rule
                .points
                .iter()
                .map(|p| if derivative { u.derivative(&phys(p)) } else { u.value(&phys(p)) })
                .collect();
            let phys_basis: Vec<Vec<Vec<f64>>> =
                table.iter().map(|fs| fs.iter().map(|v| apply_weight(wm, v)).collect()).collect();
            for test in tests {
                let mut row = vec![0.0; n];
                let mut b = 0.0;
                for (q, &wq) in it.rule.weights.iter().enumerate() {
                    let t = apply_weight(wm, &test[q]);
                    for (r, v) in row.iter_mut().zip(&phys_basis[q]) {
                        *r += wq * dot(v, &t);
                    }
                    b += wq * dot(&target[q], &t);
                }
                rows.push(row);
                rhs.push(b);
            }
        };
        push_interior(&it.derivative_tests, true);
        push_interior(&it.value_tests, false);

        solve_square(rows, rhs)
    }
}

fn solve_square(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = m.full_piv_lu();
    let diag = lu.u().diagonal();
    let big = diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let small = diag.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if n > 0 && (small.is_nan() || small <= 1e-13 * big) {
        return Err(Error::SingularSystem);
    }
    let x = lu.solve(&DVector::from_vec(rhs)).ok_or(Error::SingularSystem)?;
    Ok(x.iter().copied().collect())
}

/// Interpolant of `u` in the conforming space of order `k`.
pub fn interpolate(u: &dyn FormField, k: usize, pyramid: &AffinePyramid<f64>) -> Result<Vec<f64>> {
    Interpolator::get(u.degree(), k, Family::Conforming)?.interpolate(u, pyramid)
}
