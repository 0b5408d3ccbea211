use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::element::interpolate::bubble_coefficients;
use crate::element::{FormField, Interpolator, LocalBasis};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::spaces::{Face, Family};

use super::PyramidMesh;

/// Local degrees of freedom of a continuous element: values at the boundary
/// lattice points (`P_k` on triangles, `Q_k` on the base), then the
/// coefficients of the interior bubbles.
#[derive(Debug)]
pub struct NodalElement {
    pub basis: Arc<LocalBasis>,
    /// Reference coordinates of the boundary nodes.
    pub nodes: Vec<Vec3<f64>>,
    pub n_interior: usize,
    /// Degrees of freedom of each basis function, `[dof][function]`.
    pub dof_matrix: DMatrix<f64>,
    /// Columns are the nodal basis functions in basis coefficients.
    pub transform: DMatrix<f64>,
}

impl NodalElement {
    pub fn new(k: usize, family: Family) -> Result<Self> {
        let basis = LocalBasis::get(0, k, family)?;
        let n = basis.dim();
        let ki = k as i64;
        let mut keys = BTreeSet::new();
        for face in Face::ALL {
            let (o, tp, tq) = face.frame();
            for i in 0..=ki {
                for j in 0..=ki {
                    if face.is_triangle() && i + j > ki {
                        continue;
                    }
                    keys.insert([0, 1, 2].map(|t| o[t] * ki + i * tp[t] + j * tq[t]));
                }
            }
        }
        let nodes: Vec<Vec3<f64>> = keys.iter().map(|p| p.map(|v| v as f64 / k as f64)).collect();
        let bubbles = bubble_coefficients(&basis.space)?;
        let n_interior = bubbles.len();
        if nodes.len() + n_interior != n {
            return Err(Error::SingularSystem);
        }
        let b = DMatrix::from_fn(n, n_interior, |i, j| bubbles[j][i].to_f64().unwrap_or(f64::NAN));
        let z = (b.transpose() * &b).try_inverse().ok_or(Error::SingularSystem)? * b.transpose();
        let mut dof_matrix = DMatrix::zeros(n, n);
        for (m, p) in nodes.iter().enumerate() {
            for (j, v) in basis.values(p).iter().enumerate() {
                dof_matrix[(m, j)] = v[0];
            }
        }
        dof_matrix.view_mut((nodes.len(), 0), (n_interior, n)).copy_from(&z);
        let transform = dof_matrix.clone().full_piv_lu().try_inverse().ok_or(Error::SingularSystem)?;
        Ok(Self { basis, nodes, n_interior, dof_matrix, transform })
    }

    /// Cached nodal element for `(k, family)`.
    pub fn get(k: usize, family: Family) -> Result<Arc<Self>> {
        type Cache = RwLock<HashMap<(usize, Family), Arc<NodalElement>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(e) = cache.read().expect("element cache poisoned").get(&(k, family)) {
            return Ok(e.clone());
        }
        let built = Arc::new(Self::new(k, family)?);
        let mut w = cache.write().expect("element cache poisoned");
        Ok(w.entry((k, family)).or_insert(built).clone())
    }

    pub fn dim(&self) -> usize {
        self.transform.nrows()
    }

    /// Basis coefficients from local degrees of freedom.
    pub fn coefficients(&self, dofs: &[f64]) -> Vec<f64> {
        (&self.transform * DVector::from_column_slice(dofs)).iter().copied().collect()
    }
}

/// Continuous global space: shared lattice nodes plus element bubbles.
#[derive(Debug)]
pub struct GlobalSpace {
    pub k: usize,
    pub family: Family,
    pub element: Arc<NodalElement>,
    /// Local-to-global maps, per element.
    pub dofs: Vec<Vec<usize>>,
    pub n_dofs: usize,
    /// Degrees of freedom fixed by a homogeneous Dirichlet condition.
    pub boundary: Vec<bool>,
}

impl GlobalSpace {
    pub fn new(mesh: &PyramidMesh, k: usize, family: Family) -> Result<Self> {
        let element = NodalElement::get(k, family)?;
        let scale = (2 * mesh.n * k) as f64;
        let mut index: HashMap<[i64; 3], usize> = HashMap::new();
        let mut boundary = Vec::new();
        let mut dofs = Vec::with_capacity(mesh.elements.len());
        for el in &mesh.elements {
            let mut map = Vec::with_capacity(element.dim());
            for p in &element.nodes {
                let x = el.pyramid.map(p);
                let mut key = [0i64; 3];
                for t in 0..3 {
                    let v = x[t] * scale;
                    if (v - v.round()).abs() > 1e-8 {
                        return Err(Error::NonconformingMesh(format!("node {x:?} is off the lattice")));
                    }
                    key[t] = v.round() as i64;
                }
                let next = boundary.len();
                let id = *index.entry(key).or_insert_with(|| {
                    boundary.push(key.iter().any(|&c| c == 0 || c == scale as i64));
                    next
                });
                map.push(id);
            }
            for _ in 0..element.n_interior {
                map.push(boundary.len());
                boundary.push(false);
            }
            dofs.push(map);
        }
        Ok(Self { k, family, element, dofs, n_dofs: boundary.len(), boundary })
    }

    pub fn local_dofs(&self, e: usize, global: &[f64]) -> Vec<f64> {
        self.dofs[e].iter().map(|&g| global[g]).collect()
    }

    /// Global vector of the element-wise projection-based interpolants of
    /// `u`. Shared nodes take the value from the lowest-numbered element.
    pub fn interpolate(&self, mesh: &PyramidMesh, u: &dyn FormField) -> Result<Vec<f64>> {
        let ip = Interpolator::get(0, self.k, self.family)?;
        let local: Vec<Vec<f64>> = mesh
            .elements
            .par_iter()
            .map(|el| {
                let c = ip.interpolate(u, &el.pyramid)?;
                Ok((&self.element.dof_matrix * DVector::from_vec(c)).iter().copied().collect())
            })
            .collect::<Result<_>>()?;
        let mut out = vec![f64::NAN; self.n_dofs];
        for (map, vals) in self.dofs.iter().zip(&local) {
            for (&g, &v) in map.iter().zip(vals) {
                if out[g].is_nan() {
                    out[g] = v;
                }
            }
        }
        Ok(out)
    }
}
