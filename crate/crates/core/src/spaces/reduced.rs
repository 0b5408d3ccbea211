use crate::error::{Error, Result};
use crate::ratpoly::{RationalPoly, SpaceSpec};

use super::FormPoly;

pub(super) fn bracket(l: i64, m: i64, k: i64) -> Vec<RationalPoly> {
    SpaceSpec::Bracket { l, m, k }
        .monomials()
        .into_iter()
        .map(|mo| RationalPoly::monomial(mo.a, mo.b, mo.c))
        .collect()
}

/// `Q_{k+1}^{[k-1,k]} x Q_{k+1}^{[k,k-1]} x {0}`: the part of the reduced
/// 1-forms on which curl is injective.
pub(super) fn curl_block(k: i64) -> Vec<FormPoly> {
    let mut out: Vec<FormPoly> = bracket(k - 1, k, k + 1).into_iter().map(|p| FormPoly::unit(1, 0, p)).collect();
    out.extend(bracket(k, k - 1, k + 1).into_iter().map(|p| FormPoly::unit(1, 1, p)));
    out
}

pub(super) fn spanning_set(s: usize, k: usize) -> Result<Vec<FormPoly>> {
    let k = k as i64;
    let scalars = |s: usize, ps: Vec<RationalPoly>| ps.into_iter().map(move |p| FormPoly::scalar(s, p));
    Ok(match s {
        0 => scalars(0, bracket(k, k, k)).collect(),
        1 => {
            let mut out = curl_block(k);
            for p in scalars(0, bracket(k, k, k)) {
                let g = p.exterior_derivative()?;
                if !g.is_zero() {
                    out.push(g);
                }
            }
            out
        }
        2 => {
            let mut out: Vec<FormPoly> =
                bracket(k - 1, k - 1, k + 2).into_iter().map(|p| FormPoly::unit(2, 2, p)).collect();
            for f in curl_block(k) {
                out.push(f.exterior_derivative()?);
            }
            out
        }
        3 => scalars(3, bracket(k - 1, k - 1, k + 3)).collect(),
        _ => return Err(Error::Degree(s)),
    })
}
