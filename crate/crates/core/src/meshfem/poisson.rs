use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use rayon::prelude::*;

use crate::element::{local_derivative_matrix, CoefficientTensor};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::quadrature::conical_rule;
use crate::spaces::Family;

use super::{GlobalSpace, PyramidMesh};

/// `T^T K T`: an element matrix in the nodal basis.
fn to_nodal(space: &GlobalSpace, m: &DMatrix<f64>) -> DMatrix<f64> {
    let t = &space.element.transform;
    t.transpose() * m * t
}

/// Element stiffness matrices `S_q(A(grad u_i, grad u_j))` in the nodal
/// basis, in element order.
pub fn element_stiffness(
    mesh: &PyramidMesh,
    space: &GlobalSpace,
    a: &CoefficientTensor,
    q: usize,
) -> Result<Vec<DMatrix<f64>>> {
    if a.s != 1 {
        return Err(Error::DimensionMismatch(format!("the Poisson coefficient acts on gradients, got s = {}", a.s)));
    }
    let rule = conical_rule(q)?;
    let basis = &space.element.basis;
    mesh.elements
        .par_iter()
        .map(|el| Ok(to_nodal(space, &local_derivative_matrix(basis, a, &el.pyramid, &rule)?)))
        .collect()
}

/// Element load vectors `S_{k+2}(f u_i)` in the nodal basis.
pub fn element_load(
    mesh: &PyramidMesh,
    space: &GlobalSpace,
    f: &(dyn Fn(&Vec3<f64>) -> f64 + Sync),
) -> Result<Vec<DVector<f64>>> {
    let rule = conical_rule::<f64>(space.k + 2)?;
    let basis = &space.element.basis;
    let t = &space.element.transform;
    mesh.elements
        .par_iter()
        .map(|el| {
            let det = el.pyramid.det();
            let mut b = DVector::zeros(basis.dim());
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                let fx = w * det * f(&el.pyramid.map(p));
                for (bi, v) in b.iter_mut().zip(basis.values(p)) {
                    *bi += fx * v[0];
                }
            }
            Ok(t.transpose() * b)
        })
        .collect()
}

fn merge(space: &GlobalSpace, local: &[DMatrix<f64>], index: impl Fn(usize) -> Option<usize>, n: usize) -> CooMatrix<f64> {
    let mut coo = CooMatrix::new(n, n);
    for (map, m) in space.dofs.iter().zip(local) {
        for (i, &gi) in map.iter().enumerate() {
            let Some(ri) = index(gi) else { continue };
            for (j, &gj) in map.iter().enumerate() {
                if let Some(rj) = index(gj) {
                    coo.push(ri, rj, m[(i, j)]);
                }
            }
        }
    }
    coo
}

/// Global matrix of element matrices over all degrees of freedom.
pub fn assemble_global(space: &GlobalSpace, local: &[DMatrix<f64>]) -> CsrMatrix<f64> {
    CsrMatrix::from(&merge(space, local, Some, space.n_dofs))
}

/// Stiffness matrix over all degrees of freedom, with the order-`q` rule.
pub fn assemble_stiffness(mesh: &PyramidMesh, space: &GlobalSpace, a: &CoefficientTensor, q: usize) -> Result<CsrMatrix<f64>> {
    Ok(assemble_global(space, &element_stiffness(mesh, space, a, q)?))
}

/// Poisson system with homogeneous Dirichlet conditions eliminated.
#[derive(Debug)]
pub struct GlobalSystem {
    pub space: GlobalSpace,
    /// Restricted to the free degrees of freedom.
    pub matrix: CsrMatrix<f64>,
    pub load: Vec<f64>,
    /// Free index of each global degree of freedom.
    pub free: Vec<Option<usize>>,
}

pub fn assemble_poisson(
    mesh: &PyramidMesh,
    k: usize,
    a: &CoefficientTensor,
    f: &(dyn Fn(&Vec3<f64>) -> f64 + Sync),
    q: usize,
) -> Result<GlobalSystem> {
    let space = GlobalSpace::new(mesh, k, Family::Conforming)?;
    let mut free = Vec::with_capacity(space.n_dofs);
    let mut n_free = 0;
    for &b in &space.boundary {
        free.push((!b).then(|| {
            n_free += 1;
            n_free - 1
        }));
    }
    let stiff = element_stiffness(mesh, &space, a, q)?;
    let loads = element_load(mesh, &space, f)?;
    let matrix = CsrMatrix::from(&merge(&space, &stiff, |g| free[g], n_free));
    let mut load = vec![0.0; n_free];
    for (map, b) in space.dofs.iter().zip(&loads) {
        for (&g, v) in map.iter().zip(b.iter()) {
            if let Some(r) = free[g] {
                load[r] += v;
            }
        }
    }
    Ok(GlobalSystem { space, matrix, load, free })
}

impl GlobalSystem {
    pub fn n_free(&self) -> usize {
        self.load.len()
    }

    /// Solves by sparse Cholesky; the result covers all degrees of freedom,
    /// with zeros on the boundary.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let x = if self.n_free() == 0 {
            DMatrix::zeros(0, 1)
        } else {
            let chol = CscCholesky::factor(&CscMatrix::from(&self.matrix)).map_err(|_| Error::Indefinite)?;
            chol.solve(&DMatrix::from_column_slice(self.n_free(), 1, &self.load))
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Indefinite);
        }
        Ok(self.free.iter().map(|r| r.map_or(0.0, |r| x[(r, 0)])).collect())
    }

    /// `||K u - f|| / ||f||` on the free degrees of freedom.
    pub fn relative_residual(&self, u: &[f64]) -> f64 {
        let mut uf = vec![0.0; self.n_free()];
        for (g, r) in self.free.iter().enumerate() {
            if let Some(r) = r {
                uf[*r] = u[g];
            }
        }
        let ku = &self.matrix * &DMatrix::from_column_slice(self.n_free(), 1, &uf);
        let num: f64 = ku.iter().zip(&self.load).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = self.load.iter().map(|v| v * v).sum();
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }
}

/// `L^2` and `H^1`-seminorm errors of a global function, with the order
/// `k + 3` rule on each element.
pub fn error_norms(
    mesh: &PyramidMesh,
    space: &GlobalSpace,
    u_h: &[f64],
    u: &(dyn Fn(&Vec3<f64>) -> f64 + Sync),
    grad_u: &(dyn Fn(&Vec3<f64>) -> Vec3<f64> + Sync),
) -> Result<(f64, f64)> {
    let rule = conical_rule::<f64>(space.k + 3)?;
    let basis = &space.element.basis;
    let parts: Vec<(f64, f64)> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let k = &mesh.elements[e].pyramid;
            let c = space.element.coefficients(&space.local_dofs(e, u_h));
            let jit = k.affine_weight(1)?;
            let det = k.det();
            let mut l2 = 0.0;
            let mut h1 = 0.0;
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                let x = k.map(p);
                let v = basis.combination(&c, p)[0];
                let g = crate::element::apply_weight(&jit, &basis.derivative_combination(&c, p));
                let gu = grad_u(&x);
                l2 += w * det * (v - u(&x)).powi(2);
                h1 += w * det * (0..3).map(|t| (g[t] - gu[t]).powi(2)).sum::<f64>();
            }
            Ok((l2, h1))
        })
        .collect::<Result<_>>()?;
    let (l2, h1) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((l2.sqrt(), h1.sqrt()))
}
