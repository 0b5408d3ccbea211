use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::spaces::component_count;

type MatrixFn = dyn Fn(&Vec3<f64>) -> Vec<Vec<f64>> + Send + Sync;

#[derive(Clone)]
pub enum TensorKind {
    Constant(Vec<Vec<f64>>),
    /// Matrix-valued function of physical position with a declared
    /// smoothness order.
    Field { eval: Arc<MatrixFn>, smoothness: usize },
}

/// The coefficient `A^{ab}` of a bilinear form on `s`-forms, acting on
/// physical proxy components.
#[derive(Clone)]
pub struct CoefficientTensor {
    pub s: usize,
    pub kind: TensorKind,
}

impl fmt::Debug for CoefficientTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TensorKind::Constant(m) => write!(f, "CoefficientTensor(s={}, constant {m:?})", self.s),
            TensorKind::Field { smoothness, .. } => {
                write!(f, "CoefficientTensor(s={}, field of smoothness {smoothness})", self.s)
            }
        }
    }
}

impl CoefficientTensor {
    pub fn constant(s: usize, m: Vec<Vec<f64>>) -> Result<Self> {
        let n = component_count(s);
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("coefficient for {s}-forms must be {n}x{n}")));
        }
        Ok(Self { s, kind: TensorKind::Constant(m) })
    }

    pub fn identity(s: usize) -> Self {
        let n = component_count(s);
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { s, kind: TensorKind::Constant(m) }
    }

    pub fn field(
        s: usize,
        smoothness: usize,
        eval: impl Fn(&Vec3<f64>) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self { s, kind: TensorKind::Field { eval: Arc::new(eval), smoothness } }
    }

    /// `a(x) I`.
    pub fn scalar_field(s: usize, smoothness: usize, a: impl Fn(&Vec3<f64>) -> f64 + Send + Sync + 'static) -> Self {
        let n = component_count(s);
        Self::field(s, smoothness, move |x| {
            let v = a(x);
            (0..n).map(|i| (0..n).map(|j| if i == j { v } else { 0.0 }).collect()).collect()
        })
    }

    pub fn dim(&self) -> usize {
        component_count(self.s)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, TensorKind::Constant(_))
    }

    /// Declared smoothness; constants are smooth of every order.
    pub fn smoothness(&self) -> usize {
        match &self.kind {
            TensorKind::Constant(_) => usize::MAX,
            TensorKind::Field { smoothness, .. } => *smoothness,
        }
    }

    pub fn eval(&self, x: &Vec3<f64>) -> Vec<Vec<f64>> {
        match &self.kind {
            TensorKind::Constant(m) => m.clone(),
            TensorKind::Field { eval, .. } => eval(x),
        }
    }
}
