//! Named coefficients and manufactured solutions.

use std::f64::consts::PI;

use crate::element::{CoefficientTensor, FnField, FormField};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

type ScalarFn = fn(&Vec3<f64>) -> f64;
type VectorFn = fn(&Vec3<f64>) -> Vec3<f64>;

/// A scalar coefficient `a(x)`, used as `a I` on forms of any degree.
#[derive(Debug, Clone, Copy)]
pub struct ScalarCoefficient {
    pub name: &'static str,
    pub value: ScalarFn,
    pub gradient: VectorFn,
    /// Constant coefficients are exactly integrated by the matching rule.
    pub constant: bool,
}

impl ScalarCoefficient {
    pub fn tensor(&self, s: usize) -> CoefficientTensor {
        if self.constant {
            let v = (self.value)(&[0.0; 3]);
            let n = crate::spaces::component_count(s);
            let m = (0..n).map(|i| (0..n).map(|j| if i == j { v } else { 0.0 }).collect()).collect();
            CoefficientTensor::constant(s, m).expect("square by construction")
        } else {
            CoefficientTensor::scalar_field(s, usize::MAX, self.value)
        }
    }
}

pub const COEFFICIENT_PRESETS: [&str; 3] = ["identity", "poly1", "smooth"];
pub const SOLUTION_PRESETS: [&str; 2] = ["sin3", "poly_bubble"];

pub fn coefficient_preset(name: &str) -> Result<ScalarCoefficient> {
    Ok(match name {
        "identity" => ScalarCoefficient { name: "identity", value: |_| 1.0, gradient: |_| [0.0; 3], constant: true },
        "poly1" => ScalarCoefficient {
            name: "poly1",
            value: |x| 1.0 + x[0] * x[1],
            gradient: |x| [x[1], x[0], 0.0],
            constant: false,
        },
        "smooth" => ScalarCoefficient {
            name: "smooth",
            value: |x| (x[0] + 0.5 * x[1] * x[2]).exp(),
            gradient: |x| {
                let e = (x[0] + 0.5 * x[1] * x[2]).exp();
                [e, 0.5 * x[2] * e, 0.5 * x[1] * e]
            },
            constant: false,
        },
        other => return Err(Error::Config(format!("unknown coefficient preset {other:?}"))),
    })
}

/// A solution vanishing on the boundary of the unit cube, with its gradient
/// and Laplacian.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedSolution {
    pub name: &'static str,
    pub value: ScalarFn,
    pub gradient: VectorFn,
    pub laplacian: ScalarFn,
}

pub fn solution_preset(name: &str) -> Result<ManufacturedSolution> {
    Ok(match name {
        "sin3" => ManufacturedSolution {
            name: "sin3",
            value: |x| (PI * x[0]).sin() * (PI * x[1]).sin() * (PI * x[2]).sin(),
            gradient: |x| {
                let (s, c) = (x.map(|v| (PI * v).sin()), x.map(|v| (PI * v).cos()));
                [PI * c[0] * s[1] * s[2], PI * s[0] * c[1] * s[2], PI * s[0] * s[1] * c[2]]
            },
            laplacian: |x| -3.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin() * (PI * x[2]).sin(),
        },
        "poly_bubble" => ManufacturedSolution {
            name: "poly_bubble",
            value: |x| x.iter().map(|v| v * (1.0 - v)).product(),
            gradient: |x| {
                let b = x.map(|v| v * (1.0 - v));
                let d = x.map(|v| 1.0 - 2.0 * v);
                [d[0] * b[1] * b[2], b[0] * d[1] * b[2], b[0] * b[1] * d[2]]
            },
            laplacian: |x| {
                let b = x.map(|v| v * (1.0 - v));
                -2.0 * (b[1] * b[2] + b[0] * b[2] + b[0] * b[1])
            },
        },
        other => return Err(Error::Config(format!("unknown solution preset {other:?}"))),
    })
}

impl ManufacturedSolution {
    /// `f = -div(a grad u)`.
    pub fn source(&self, a: &ScalarCoefficient) -> impl Fn(&Vec3<f64>) -> f64 + Sync + '_ {
        let (a, u) = (*a, *self);
        move |x| {
            let g = (u.gradient)(x);
            let ga = (a.gradient)(x);
            -((a.value)(x) * (u.laplacian)(x) + g[0] * ga[0] + g[1] * ga[1] + g[2] * ga[2])
        }
    }

    /// The solution as a 0-form field.
    pub fn field(&self) -> impl FormField {
        let (v, g) = (self.value, self.gradient);
        FnField::new(0, move |x: &Vec3<f64>| vec![v(x)], move |x: &Vec3<f64>| g(x).to_vec())
    }
}
