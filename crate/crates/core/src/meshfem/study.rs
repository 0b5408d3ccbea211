use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use serde::Serialize;

use crate::element::{local_bilinear_matrix, local_derivative_matrix, CoefficientTensor, REFERENCE_ORDER_SHIFT};
use crate::error::{Error, Result};
use crate::quadrature::conical_rule;
use crate::spaces::Family;

use super::poisson::element_stiffness;
use super::{
    assemble_global, assemble_poisson, build_cube_mesh, error_norms, GlobalSpace, ManufacturedSolution,
    ScalarCoefficient,
};

pub const CSV_HEADER: &str = "n,h,dofs,l2_error,h1_error,consistency,rate_l2,rate_h1,rate_consistency";

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub l2_error: Option<f64>,
    pub h1_error: Option<f64>,
    /// `max_i |E(w_i)| / ||w_i||_0` over the global basis.
    pub consistency: Option<f64>,
    /// `sup_w |E(w)| / ||w||_0` over the discrete space.
    pub consistency_dual: Option<f64>,
    /// As `consistency`, normalized by `||w_i||_1`.
    pub elliptic: Option<f64>,
    /// As `consistency_dual`, normalized by `||w||_1`.
    pub elliptic_dual: Option<f64>,
}

/// Least-squares slopes of `log(value)` against `-log(h)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Rates {
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub consistency: Option<f64>,
    pub consistency_dual: Option<f64>,
    pub elliptic: Option<f64>,
    pub elliptic_dual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub kind: String,
    pub k: usize,
    pub q: usize,
    pub coefficient: String,
    pub solution: String,
    pub rows: Vec<StudyRow>,
    pub rates: Rates,
}

/// Fitted rate `r` in `value ~ C h^r`; `None` with fewer than two usable
/// points.
pub fn fitted_rate(h: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(values)
        .filter(|(h, v)| **h > 0.0 && **v > 0.0 && v.is_finite())
        .map(|(h, v)| (h.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn column_rate(rows: &[StudyRow], f: impl Fn(&StudyRow) -> Option<f64>) -> Option<f64> {
    let (h, v): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| f(r).map(|v| (r.h, v))).unzip();
    fitted_rate(&h, &v)
}

fn pair_rate(prev: Option<&StudyRow>, row: &StudyRow, f: impl Fn(&StudyRow) -> Option<f64>) -> Option<f64> {
    let p = prev?;
    fitted_rate(&[p.h, row.h], &[f(p)?, f(row)?])
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

impl StudyResult {
    fn new(kind: &str, k: usize, q: usize, a: &ScalarCoefficient, u: &ManufacturedSolution, rows: Vec<StudyRow>) -> Self {
        let rates = Rates {
            l2: column_rate(&rows, |r| r.l2_error),
            h1: column_rate(&rows, |r| r.h1_error),
            consistency: column_rate(&rows, |r| r.consistency),
            consistency_dual: column_rate(&rows, |r| r.consistency_dual),
            elliptic: column_rate(&rows, |r| r.elliptic),
            elliptic_dual: column_rate(&rows, |r| r.elliptic_dual),
        };
        Self {
            kind: kind.into(),
            k,
            q,
            coefficient: a.name.into(),
            solution: u.name.into(),
            rows,
            rates,
        }
    }

    /// One line per `n`; the rate columns compare each row with the previous
    /// one.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let prev = i.checked_sub(1).map(|p| &self.rows[p]);
            let fields = [
                r.n.to_string(),
                format!("{:.6e}", r.h),
                r.dofs.to_string(),
                cell(r.l2_error),
                cell(r.h1_error),
                cell(r.consistency),
                cell(pair_rate(prev, r, |r| r.l2_error)),
                cell(pair_rate(prev, r, |r| r.h1_error)),
                cell(pair_rate(prev, r, |r| r.consistency)),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::Config("the n list must be non-empty with every n >= 1".into()));
    }
    Ok(())
}

/// Poisson solves with the order-`q` rule, with errors against `u`.
pub fn convergence_study(
    k: usize,
    q: usize,
    ns: &[usize],
    a: &ScalarCoefficient,
    u: &ManufacturedSolution,
) -> Result<StudyResult> {
    check_ns(ns)?;
    let tensor = a.tensor(1);
    let f = u.source(a);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = build_cube_mesh(n)?;
        let sys = assemble_poisson(&mesh, k, &tensor, &f, q)?;
        let uh = sys.solve()?;
        let (l2, h1) = error_norms(&mesh, &sys.space, &uh, &u.value, &|x| (u.gradient)(x))?;
        rows.push(StudyRow {
            n,
            h: mesh.h,
            dofs: sys.space.n_dofs,
            l2_error: Some(l2),
            h1_error: Some(h1),
            ..Default::default()
        });
    }
    Ok(StudyResult::new("convergence", k, q, a, u, rows))
}

fn restrict(m: &CsrMatrix<f64>, free: &[usize]) -> CsrMatrix<f64> {
    let mut pos = vec![usize::MAX; m.nrows()];
    for (i, &g) in free.iter().enumerate() {
        pos[g] = i;
    }
    let mut out = CooMatrix::new(free.len(), free.len());
    for (i, j, v) in m.triplet_iter() {
        if pos[i] != usize::MAX && pos[j] != usize::MAX {
            out.push(pos[i], pos[j], *v);
        }
    }
    CsrMatrix::from(&out)
}

/// Both normalizations of a functional given by its values on a basis with
/// Gram matrix `gram`.
fn quotients(e: &[f64], gram: &CsrMatrix<f64>) -> Result<(f64, f64)> {
    let diag = gram.diagonal_as_csr();
    let mut d = vec![0.0; e.len()];
    for (i, _, v) in diag.triplet_iter() {
        d[i] = *v;
    }
    let basis_max = e.iter().zip(&d).map(|(e, d)| e.abs() / d.sqrt()).fold(0.0, f64::max);
    let chol = CscCholesky::factor(&CscMatrix::from(gram)).map_err(|_| Error::Indefinite)?;
    let x = chol.solve(&DMatrix::from_column_slice(e.len(), 1, e));
    let dual = e.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt();
    Ok((basis_max, dual))
}

/// Global consistency of the order-`k` rule for `a(u, v) = (A grad u, grad v)`
/// on the interpolant of `u`, against the order `k + 4` rule, over the
/// interior basis functions of the reduced space.
pub fn consistency_study(k: usize, ns: &[usize], a: &ScalarCoefficient, u: &ManufacturedSolution) -> Result<StudyResult> {
    check_ns(ns)?;
    let tensor = a.tensor(1);
    let field = u.field();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = build_cube_mesh(n)?;
        let space = GlobalSpace::new(&mesh, k, Family::Reduced)?;
        let uh = DVector::from_vec(space.interpolate(&mesh, &field)?);
        let low = assemble_global(&space, &element_stiffness(&mesh, &space, &tensor, k)?);
        let high = assemble_global(&space, &element_stiffness(&mesh, &space, &tensor, k + REFERENCE_ORDER_SHIFT)?);
        let err = &low * &uh - &high * &uh;
        let free: Vec<usize> = (0..space.n_dofs).filter(|&g| !space.boundary[g]).collect();
        let e: Vec<f64> = free.iter().map(|&g| err[g]).collect();
        let (mass, h1) = gram_matrices(&mesh, &space, &free)?;
        let (c, cd) = quotients(&e, &mass)?;
        let (el, eld) = quotients(&e, &h1)?;
        rows.push(StudyRow {
            n,
            h: mesh.h,
            dofs: space.n_dofs,
            consistency: Some(c),
            consistency_dual: Some(cd),
            elliptic: Some(el),
            elliptic_dual: Some(eld),
            ..Default::default()
        });
    }
    Ok(StudyResult::new("consistency", k, k, a, u, rows))
}

/// `L^2` and full `H^1` Gram matrices on the free degrees of freedom.
fn gram_matrices(mesh: &super::PyramidMesh, space: &GlobalSpace, free: &[usize]) -> Result<(CsrMatrix<f64>, CsrMatrix<f64>)> {
    use rayon::prelude::*;
    let rule = conical_rule(space.k + REFERENCE_ORDER_SHIFT)?;
    let basis = &space.element.basis;
    let t = &space.element.transform;
    let (m0, m1): (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) = mesh
        .elements
        .par_iter()
        .map(|el| {
            let m = local_bilinear_matrix(basis, &CoefficientTensor::identity(0), &el.pyramid, &rule)?;
            let s = local_derivative_matrix(basis, &CoefficientTensor::identity(1), &el.pyramid, &rule)?;
            let m = t.transpose() * m * t;
            let s = t.transpose() * s * t;
            Ok((m.clone(), m + s))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let to_free = |local: &[DMatrix<f64>]| restrict(&assemble_global(space, local), free);
    Ok((to_free(&m0), to_free(&m1)))
}
