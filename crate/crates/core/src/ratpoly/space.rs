use serde::{Deserialize, Serialize};

use super::Monomial;

/// Weighted polynomial spaces on the infinite pyramid.
///
/// A negative `l`, `m` or `n` denotes the zero space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// `Q_k^{l,m,n}`: spanned by `x^a y^b z^e / (1+z)^k`, `a <= l, b <= m, e <= n`.
    Tensor { l: i64, m: i64, n: i64, k: i64 },
    /// `Q_k^{[l,m]}`: spanned by `x^a y^b / (1+z)^c` with `0 <= c <= k`,
    /// `a <= c + l - k`, `b <= c + m - k`.
    Bracket { l: i64, m: i64, k: i64 },
    /// `Q_r^{l,m,0}`: exactly `r`-weighted polynomials.
    ExactWeight { l: i64, m: i64, r: i64 },
}

impl SpaceSpec {
    pub fn contains_monomial(&self, mono: &Monomial) -> bool {
        let (a, b, c) = (mono.a as i64, mono.b as i64, mono.c);
        match *self {
            SpaceSpec::Tensor { l, m, n, k } => {
                l >= 0 && m >= 0 && n >= 0 && a <= l && b <= m && k - n <= c && c <= k
            }
            SpaceSpec::Bracket { l, m, k } => {
                (0..=k).contains(&c) && a <= c + l - k && b <= c + m - k
            }
            SpaceSpec::ExactWeight { l, m, r } => c == r && a <= l && b <= m,
        }
    }

    /// Canonical monomial basis of the space.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out = Vec::new();
        match *self {
            SpaceSpec::Tensor { l, m, n, k } => {
                if l < 0 || m < 0 || n < 0 {
                    return out;
                }
                for c in (k - n)..=k {
                    for a in 0..=l {
                        for b in 0..=m {
                            out.push(Monomial::new(a as u32, b as u32, c));
                        }
                    }
                }
            }
            SpaceSpec::Bracket { l, m, k } => {
                for c in 0..=k {
                    for a in 0..=(c + l - k) {
                        for b in 0..=(c + m - k) {
                            out.push(Monomial::new(a as u32, b as u32, c));
                        }
                    }
                }
            }
            SpaceSpec::ExactWeight { l, m, r } => {
                for a in 0..=l {
                    for b in 0..=m {
                        out.push(Monomial::new(a as u32, b as u32, r));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_counts() {
        // dim Q_k^{[k,k]} = sum_{c=0}^k (c+1)^2
        assert_eq!(SpaceSpec::Bracket { l: 1, m: 1, k: 1 }.monomials().len(), 5);
        assert_eq!(SpaceSpec::Bracket { l: 2, m: 2, k: 2 }.monomials().len(), 14);
        assert_eq!(SpaceSpec::Bracket { l: 0, m: 0, k: 4 }.monomials().len(), 1);
    }

    #[test]
    fn negative_degree_is_zero_space() {
        let s = SpaceSpec::Tensor { l: -1, m: 2, n: 2, k: 2 };
        assert!(s.monomials().is_empty());
        assert!(!s.contains_monomial(&Monomial::new(0, 0, 2)));
    }

    #[test]
    fn bracket_decomposes_into_exact_weights() {
        // Q_k^{[l,m]} is the direct sum of Q_r^{r+l-k, r+m-k, 0}, r = 0..k.
        for k in 0..5i64 {
            for l in 0..4i64 {
                for m in 0..4i64 {
                    let bracket = SpaceSpec::Bracket { l, m, k }.monomials();
                    let mut pieces = Vec::new();
                    for r in 0..=k {
                        pieces.extend(SpaceSpec::ExactWeight { l: r + l - k, m: r + m - k, r }.monomials());
                    }
                    assert_eq!(bracket, pieces);
                }
            }
        }
    }
}
