use serde::Serialize;

use crate::error::Result;
use crate::linalg::rank;

use super::{basis, Coords, Family, FormPoly};

/// Ranks and kernel comparisons along `R^0 -> R^1 -> R^2 -> R^3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    pub k: usize,
    pub dims: [usize; 4],
    /// Ranks of grad, curl and div restricted to the reduced spaces.
    pub ranks: [usize; 3],
    /// `d` of every basis element lands in the next reduced space.
    pub d_maps_into: [bool; 3],
    /// `d d = 0` on the bases of `R^0` and `R^1`.
    pub dd_zero: bool,
    pub grad_kernel_is_constants: bool,
    pub curl_kernel_is_grad_image: bool,
    pub div_kernel_is_curl_image: bool,
    pub div_onto: bool,
    pub euler_characteristic: i64,
}

impl SequenceReport {
    pub fn exact(&self) -> bool {
        self.d_maps_into.iter().all(|&b| b)
            && self.dd_zero
            && self.grad_kernel_is_constants
            && self.curl_kernel_is_grad_image
            && self.div_kernel_is_curl_image
            && self.div_onto
            && self.euler_characteristic == 1
    }
}

fn image_rank(forms: &[FormPoly]) -> usize {
    let mut coords = Coords::new();
    rank(&coords.vectors(forms))
}

pub fn exact_sequence_report(k: usize) -> Result<SequenceReport> {
    let spaces = [
        basis(0, k, Family::Reduced)?,
        basis(1, k, Family::Reduced)?,
        basis(2, k, Family::Reduced)?,
        basis(3, k, Family::Reduced)?,
    ];
    let dims = [spaces[0].dim(), spaces[1].dim(), spaces[2].dim(), spaces[3].dim()];
    let mut ranks = [0; 3];
    let mut d_maps_into = [false; 3];
    let mut dd_zero = true;
    for s in 0..3 {
        let images = spaces[s].basis.iter().map(|f| f.exterior_derivative()).collect::<Result<Vec<_>>>()?;
        ranks[s] = image_rank(&images);
        d_maps_into[s] = images.iter().all(|g| spaces[s + 1].contains(g));
        if s < 2 {
            for g in &images {
                dd_zero &= g.exterior_derivative()?.is_zero();
            }
        }
    }
    Ok(SequenceReport {
        k,
        dims,
        ranks,
        d_maps_into,
        dd_zero,
        grad_kernel_is_constants: dims[0] - ranks[0] == 1,
        curl_kernel_is_grad_image: dd_zero && dims[1] - ranks[1] == ranks[0],
        div_kernel_is_curl_image: dd_zero && dims[2] - ranks[2] == ranks[1],
        div_onto: ranks[2] == dims[3],
        euler_characteristic: dims[0] as i64 - dims[1] as i64 + dims[2] as i64 - dims[3] as i64,
    })
}
