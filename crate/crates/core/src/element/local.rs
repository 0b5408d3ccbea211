use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::geometry::{AffinePyramid, Vec3};
use crate::ratpoly::FloatPoly;
use crate::spaces::{basis, component_count, Family, SpaceBasis};

use super::FormField;

/// Floating evaluation of a basis and of its exterior derivative on the
/// reference pyramid.
#[derive(Debug)]
pub struct LocalBasis {
    pub space: Arc<SpaceBasis>,
    hat: Vec<Vec<FloatPoly>>,
    dhat: Vec<Vec<FloatPoly>>,
    /// Limits at the apex, for 0-forms.
    apex: Option<Vec<f64>>,
}

/// Points this close to the apex take the apex limit.
const APEX_TOL: f64 = 1e-14;

impl LocalBasis {
    pub fn new(space: Arc<SpaceBasis>) -> Result<Self> {
        let mut hat = Vec::with_capacity(space.dim());
        let mut dhat = Vec::with_capacity(space.dim());
        for f in &space.basis {
            hat.push(f.pullback_components().iter().map(|p| p.to_float()).collect());
            if space.s < 3 {
                let d = f.exterior_derivative()?;
                dhat.push(d.pullback_components().iter().map(|p| p.to_float()).collect());
            }
        }
        let apex = if space.s == 0 {
            use num_traits::ToPrimitive;
            let vals = space
                .basis
                .iter()
                .map(|f| Ok(f.pullback_components()[0].apex_value()?.to_f64().unwrap_or(f64::NAN)))
                .collect::<Result<Vec<f64>>>()?;
            Some(vals)
        } else {
            None
        };
        Ok(Self { space, hat, dhat, apex })
    }

    /// Cached evaluation data for `(s, k, family)`.
    pub fn get(s: usize, k: usize, family: Family) -> Result<Arc<Self>> {
        type Cache = RwLock<HashMap<(usize, usize, Family), Arc<LocalBasis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.read().expect("basis cache poisoned").get(&(s, k, family)) {
            return Ok(b.clone());
        }
        let built = Arc::new(Self::new(basis(s, k, family)?)?);
        let mut w = cache.write().expect("basis cache poisoned");
        Ok(w.entry((s, k, family)).or_insert(built).clone())
    }

    pub fn s(&self) -> usize {
        self.space.s
    }

    pub fn k(&self) -> usize {
        self.space.k
    }

    pub fn dim(&self) -> usize {
        self.hat.len()
    }

    /// Reference proxies of every basis function, `[function][component]`.
    pub fn values(&self, p: &Vec3<f64>) -> Vec<Vec<f64>> {
        if let (Some(apex), true) = (&self.apex, p[2] > 1.0 - APEX_TOL) {
            return apex.iter().map(|&v| vec![v]).collect();
        }
        self.hat.iter().map(|c| c.iter().map(|q| q.eval(*p)).collect()).collect()
    }

    /// Reference proxies of the derivatives; empty rows for 3-forms.
    pub fn derivatives(&self, p: &Vec3<f64>) -> Vec<Vec<f64>> {
        if self.dhat.is_empty() {
            return vec![Vec::new(); self.dim()];
        }
        self.dhat.iter().map(|c| c.iter().map(|q| q.eval(*p)).collect()).collect()
    }

    pub fn combination(&self, coeffs: &[f64], p: &Vec3<f64>) -> Vec<f64> {
        combine(&self.values(p), coeffs, component_count(self.s()))
    }

    pub fn derivative_combination(&self, coeffs: &[f64], p: &Vec3<f64>) -> Vec<f64> {
        if self.s() == 3 {
            return Vec::new();
        }
        combine(&self.derivatives(p), coeffs, component_count(self.s() + 1))
    }
}

fn combine(rows: &[Vec<f64>], coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (row, c) in rows.iter().zip(coeffs) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += c * v;
        }
    }
    out
}

/// `W x` for a weight matrix from [`AffinePyramid::affine_weight`].
pub fn apply_weight(w: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    w.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

type Matrix = Vec<Vec<f64>>;

/// Physical weights for degrees `s` and `s + 1`.
pub(crate) fn weights(k: &AffinePyramid<f64>, s: usize) -> Result<(Matrix, Matrix)> {
    let w = k.affine_weight(s)?;
    let dw = if s < 3 { k.affine_weight(s + 1)? } else { Vec::new() };
    Ok((w, dw))
}

/// A member of a local space on a physical pyramid, as a [`FormField`].
pub struct ElementFunction {
    basis: Arc<LocalBasis>,
    coeffs: Vec<f64>,
    pyramid: AffinePyramid<f64>,
    w: Vec<Vec<f64>>,
    dw: Vec<Vec<f64>>,
}

impl ElementFunction {
    pub fn new(basis: Arc<LocalBasis>, coeffs: Vec<f64>, pyramid: AffinePyramid<f64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for a basis of {}", coeffs.len(), basis.dim())));
        }
        let (w, dw) = weights(&pyramid, basis.s())?;
        Ok(Self { basis, coeffs, pyramid, w, dw })
    }

    fn reference_point(&self, x: &Vec3<f64>) -> Vec3<f64> {
        self.pyramid.inverse_map(x).expect("pyramid checked on construction")
    }
}

impl FormField for ElementFunction {
    fn degree(&self) -> usize {
        self.basis.s()
    }

    fn value(&self, x: &Vec3<f64>) -> Vec<f64> {
        apply_weight(&self.w, &self.basis.combination(&self.coeffs, &self.reference_point(x)))
    }

    fn derivative(&self, x: &Vec3<f64>) -> Vec<f64> {
        apply_weight(&self.dw, &self.basis.derivative_combination(&self.coeffs, &self.reference_point(x)))
    }
}
