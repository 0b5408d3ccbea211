use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratpoly::{Axis, RationalPoly};

use super::{basis, Family, FormPoly, SpaceBasis};

/// Splits `u` into exactly `r`-weighted parts.
///
/// The reference components `w u~` are grouped by their `(1+z)` exponent and
/// each group is mapped back through the inverse weight. The parts sum to `u`.
pub fn decompose_exact_weight(u: &FormPoly, reduced: &SpaceBasis) -> Result<BTreeMap<i64, FormPoly>> {
    if !reduced.contains(u) {
        return Err(Error::NotInSpace);
    }
    let s = u.degree();
    let hat = u.pullback_components();
    let mut groups: BTreeMap<i64, Vec<RationalPoly>> = BTreeMap::new();
    for (i, comp) in hat.iter().enumerate() {
        for (r, part) in comp.group_by_weight() {
            groups.entry(r).or_insert_with(|| vec![RationalPoly::zero(); hat.len()])[i] = part;
        }
    }
    groups.into_iter().map(|(r, comps)| Ok((r, FormPoly::from_reference(s, &comps)?))).collect()
}

/// One row of the integrability table for an exactly `r`-weighted scalar.
#[derive(Debug, Clone, Serialize)]
pub struct LadderEntry {
    pub r: usize,
    /// Exponents `(a, b)` of the generator `x^a y^b (1+z)^-r`.
    pub generator: (u32, u32),
    /// Derivative counts along `(xi, eta, zeta)`.
    pub gamma: [u32; 3],
    /// Smallest `c` in the square of the derivative, if it is non-zero.
    pub c_min: Option<i64>,
    /// Whether the exact integral of the square exists.
    pub integrable: bool,
    /// `r + 1 - |gamma| > -1/2`.
    pub regularity_bound: bool,
}

/// Integrability of squared reference derivatives of every generator of the
/// exactly `r`-weighted 0-forms, for all derivative orders up to `r + 2`.
pub fn ladder_check(k: usize) -> Result<Vec<LadderEntry>> {
    let mut out = Vec::new();
    for r in 0..=k {
        let xr = basis(0, k, Family::ExactWeight(r))?;
        for f in &xr.basis {
            let e = &f.components()[0];
            let generator = e.terms().next().map(|(m, _)| (m.a, m.b)).unwrap_or((0, 0));
            let max = r as u32 + 2;
            for n in 0..=max {
                for g0 in 0..=n {
                    for g1 in 0..=(n - g0) {
                        let gamma = [g0, g1, n - g0 - g1];
                        let mut d = e.clone();
                        for (ax, &cnt) in Axis::ALL.iter().zip(&gamma) {
                            for _ in 0..cnt {
                                d = d.reference_partial(*ax);
                            }
                        }
                        let sq = &d * &d;
                        out.push(LadderEntry {
                            r,
                            generator,
                            gamma,
                            c_min: sq.c_range().map(|(lo, _)| lo),
                            integrable: sq.integrate_reference().is_ok(),
                            regularity_bound: (r as f64 + 1.0 - n as f64) > -0.5,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
