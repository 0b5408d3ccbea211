use crate::error::{Error, Result};
use crate::ratpoly::{Axis, RationalPoly, SpaceSpec};

use super::FormPoly;

fn tensor(l: i64, m: i64, n: i64, k: i64) -> Vec<RationalPoly> {
    SpaceSpec::Tensor { l, m, n, k }
        .monomials()
        .into_iter()
        .map(|mo| RationalPoly::monomial(mo.a, mo.b, mo.c))
        .collect()
}

fn xy(a: u32, b: u32) -> RationalPoly {
    RationalPoly::monomial(a, b, 0)
}

/// Spanning set of the underlying space of degree `s` and order `k`.
pub(super) fn spanning_set(s: usize, k: usize) -> Result<Vec<FormPoly>> {
    let ki = k as i64;
    let ku = k as u32;
    let mut out = Vec::new();
    match s {
        0 => {
            out.extend(tensor(ki, ki, ki - 1, ki).into_iter().map(|p| FormPoly::scalar(0, p)));
            out.push(FormPoly::scalar(0, RationalPoly::with_z_numerator(0, 0, ku, ki)));
        }
        1 => {
            let blocks = [tensor(ki - 1, ki, ki - 1, ki + 1), tensor(ki, ki - 1, ki - 1, ki + 1), tensor(ki, ki, ki - 2, ki + 1)];
            for (i, block) in blocks.into_iter().enumerate() {
                out.extend(block.into_iter().map(|p| FormPoly::unit(1, i, p)));
            }
            let g = RationalPoly::with_z_numerator(0, 0, ku - 1, ki + 1);
            let gz = &g * &RationalPoly::with_z_numerator(0, 0, 1, 0);
            for a in 0..=ku {
                for b in 0..=ku {
                    let r = xy(a, b);
                    out.push(FormPoly::vector(
                        1,
                        [&gz * &r.partial_derivative(Axis::X), &gz * &r.partial_derivative(Axis::Y), -(&g * &r)],
                    ));
                }
            }
        }
        2 => {
            let blocks = [
                tensor(ki, ki - 1, ki - 2, ki + 2),
                tensor(ki - 1, ki, ki - 2, ki + 2),
                tensor(ki - 1, ki - 1, ki - 1, ki + 2),
            ];
            for (i, block) in blocks.into_iter().enumerate() {
                out.extend(block.into_iter().map(|p| FormPoly::unit(2, i, p)));
            }
            let g = RationalPoly::with_z_numerator(0, 0, ku - 1, ki + 2);
            let g1 = &g * &RationalPoly::monomial(0, 0, -1);
            let two = crate::ratpoly::int(2);
            for a in 0..ku {
                for b in 0..=ku {
                    let sp = xy(a, b);
                    out.push(FormPoly::vector(
                        2,
                        [RationalPoly::zero(), (&g * &sp).scale(&two), &g1 * &sp.partial_derivative(Axis::Y)],
                    ));
                }
            }
            for a in 0..=ku {
                for b in 0..ku {
                    let t = xy(a, b);
                    out.push(FormPoly::vector(
                        2,
                        [(&g * &t).scale(&two), RationalPoly::zero(), &g1 * &t.partial_derivative(Axis::X)],
                    ));
                }
            }
        }
        3 => out.extend(tensor(ki - 1, ki - 1, ki - 1, ki + 3).into_iter().map(|p| FormPoly::scalar(3, p))),
        _ => return Err(Error::Degree(s)),
    }
    Ok(out)
}
