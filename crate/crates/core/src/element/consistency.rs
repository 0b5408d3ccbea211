use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::AffinePyramid;
use crate::quadrature::conical_rule;
use crate::spaces::Family;

use super::{local_bilinear_matrix, CoefficientTensor, ElementMatrix, FormField, Interpolator, LocalBasis};

/// Order added to `k` for the rule that stands in for exact integration.
pub const REFERENCE_ORDER_SHIFT: usize = 4;

/// `E(A(v, w_i)) = S_k(A(v, w_i)) - S_{k+4}(A(v, w_i))` for every basis
/// function `w_i`, with `v` given by its coefficients.
pub fn quadrature_error_vector(
    basis: &LocalBasis,
    coeffs: &[f64],
    a: &CoefficientTensor,
    pyramid: &AffinePyramid<f64>,
    k: usize,
) -> Result<Vec<f64>> {
    let low = local_bilinear_matrix(basis, a, pyramid, &conical_rule(k)?)?;
    let high = local_bilinear_matrix(basis, a, pyramid, &conical_rule(k + REFERENCE_ORDER_SHIFT)?)?;
    let c = DVector::from_column_slice(coeffs);
    Ok(((low - high) * c).iter().copied().collect())
}

/// Physical `L^2` Gram matrix of a basis, integrated with a rule of order
/// `k + 4`.
pub fn mass_matrix(basis: &LocalBasis, pyramid: &AffinePyramid<f64>) -> Result<ElementMatrix> {
    let rule = conical_rule(basis.k() + REFERENCE_ORDER_SHIFT)?;
    local_bilinear_matrix(basis, &CoefficientTensor::identity(basis.s()), pyramid, &rule)
}

/// Both normalizations of the consistency functional `w -> E(A(v, w))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyQuotient {
    /// `max_i |E_i| / ||w_i||_0` over basis functions.
    pub basis_max: f64,
    /// `sup_w |E(w)| / ||w||_0` over the whole space.
    pub dual: f64,
}

impl ConsistencyQuotient {
    pub fn new(errors: &[f64], mass: &DMatrix<f64>) -> Result<Self> {
        let n = errors.len();
        if mass.nrows() != n {
            return Err(Error::DimensionMismatch(format!("{n} errors for a {0}x{0} mass matrix", mass.nrows())));
        }
        let basis_max = (0..n).map(|i| errors[i].abs() / mass[(i, i)].sqrt()).fold(0.0, f64::max);
        let e = DVector::from_column_slice(errors);
        let chol = mass.clone().cholesky().ok_or(Error::Indefinite)?;
        let dual = e.dot(&chol.solve(&e)).max(0.0).sqrt();
        Ok(Self { basis_max, dual })
    }
}

/// Consistency quotients on one element for the interpolant of `u` in the
/// given family.
pub fn element_consistency(
    u: &dyn FormField,
    a: &CoefficientTensor,
    pyramid: &AffinePyramid<f64>,
    k: usize,
    family: Family,
) -> Result<ConsistencyQuotient> {
    if u.degree() != a.s {
        return Err(Error::DimensionMismatch(format!("{}-form field with a {}-form coefficient", u.degree(), a.s)));
    }
    let ip = Interpolator::get(a.s, k, family)?;
    let coeffs = ip.interpolate(u, pyramid)?;
    let errors = quadrature_error_vector(&ip.basis, &coeffs, a, pyramid, k)?;
    ConsistencyQuotient::new(&errors, &mass_matrix(&ip.basis, pyramid)?)
}

/// `max_w |E_{k,K}(A(Pi u, w))| / ||w||_0` over the conforming basis.
pub fn consistency_error_element(
    u: &dyn FormField,
    a: &CoefficientTensor,
    pyramid: &AffinePyramid<f64>,
    k: usize,
) -> Result<f64> {
    Ok(element_consistency(u, a, pyramid, k, Family::Conforming)?.basis_max)
}
