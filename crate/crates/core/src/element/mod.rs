//! Element matrices, the exact oracle, projection-based interpolation and
//! element consistency errors.

mod bilinear;
mod coefficient;
mod consistency;
mod field;
pub(crate) mod interpolate;
mod local;

pub use bilinear::{
    analytic_bilinear_matrix, analytic_with_products, local_bilinear_matrix, local_derivative_matrix,
    reference_products, ElementMatrix, ExactMatrix,
};
pub use coefficient::{CoefficientTensor, TensorKind};
pub use field::{Derivative, FnField, FormField};
pub use local::{apply_weight, ElementFunction, LocalBasis};
pub use interpolate::{interpolate, Interpolator};
pub use consistency::{
    consistency_error_element, element_consistency, mass_matrix, quadrature_error_vector, ConsistencyQuotient,
    REFERENCE_ORDER_SHIFT,
};
