use crate::error::{Error, Result};
use crate::ratpoly::RationalPoly;

use super::{basis, component_count, Family, FormPoly};

/// `xi^a eta^b (1-zeta)^c` composed with the projective map.
pub fn reference_monomial(a: u32, b: u32, c: u32) -> RationalPoly {
    RationalPoly::monomial(a, b, (a + b + c) as i64)
}

/// Embeds a form with polynomial reference components into the reduced space.
///
/// `hat` holds the reference components composed with the projective map
/// (see [`reference_monomial`]). Degree limits are `k` for 0-forms and
/// `k - 1` otherwise. The result is `(w^(s))^-1 hat`, checked for membership.
pub fn polynomial_embed(s: usize, k: usize, hat: &[RationalPoly]) -> Result<FormPoly> {
    if hat.len() != component_count(s) {
        return Err(Error::DimensionMismatch(format!("{} components for a {s}-form", hat.len())));
    }
    let max = if s == 0 { k } else { k.saturating_sub(1) };
    for comp in hat {
        for (m, _) in comp.terms() {
            if m.zeta_power() < 0 {
                return Err(Error::NotInSpace);
            }
            if m.c > max as i64 {
                return Err(Error::DegreeTooHigh { got: m.c as usize, max });
            }
        }
    }
    let u = FormPoly::from_reference(s, hat)?;
    if !basis(s, k, Family::Reduced)?.contains(&u) {
        return Err(Error::NotInSpace);
    }
    Ok(u)
}
