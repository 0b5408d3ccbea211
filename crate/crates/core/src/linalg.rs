//! Exact row reduction over a [`Field`]: rank, nullspaces and incremental span
//! membership.
//!
//! Vectors are sparse maps from column index to a non-zero entry. Every
//! routine here is exact when the field is [`crate::Rational`].

use std::collections::BTreeMap;

use crate::scalar::Field;

pub type SparseVec<T> = BTreeMap<usize, T>;

/// Builds a sparse vector from a dense slice, dropping negligible entries.
pub fn sparse_from_dense<T: Field>(dense: &[T]) -> SparseVec<T> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_negligible())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

/// `target -= factor * row`, keeping `target` free of zero entries.
fn axpy<T: Field>(target: &mut SparseVec<T>, factor: &T, row: &SparseVec<T>) {
    for (col, value) in row {
        let delta = factor.clone() * value.clone();
        let remove = match target.get_mut(col) {
            Some(entry) => {
                *entry = entry.clone() - delta;
                entry.is_negligible()
            }
            None => {
                target.insert(*col, -delta);
                false
            }
        };
        if remove {
            target.remove(col);
        }
    }
}

/// Reduced row-echelon basis of a growing subspace.
///
/// Rows are kept fully reduced with unit pivots, so membership is one pass of
/// eliminations. Insertion order decides which of several dependent vectors
/// survive (first come, first kept).
#[derive(Debug, Clone)]
pub struct Subspace<T: Field> {
    rows: BTreeMap<usize, SparseVec<T>>,
}

impl<T: Field> Default for Subspace<T> {
    fn default() -> Self {
        Self { rows: BTreeMap::new() }
    }
}

impl<T: Field> Subspace<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after eliminating every pivot of the subspace.
    pub fn reduce(&self, v: &SparseVec<T>) -> SparseVec<T> {
        let mut r = v.clone();
        for (pivot, row) in &self.rows {
            if let Some(f) = r.get(pivot).cloned() {
                axpy(&mut r, &f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &SparseVec<T>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span. Returns `false` when `v` was already a member.
    pub fn insert(&mut self, v: &SparseVec<T>) -> bool {
        let mut r = self.reduce(v);
        let Some((&pivot, lead)) = r.iter().next() else {
            return false;
        };
        let inv = T::one() / lead.clone();
        for value in r.values_mut() {
            *value = value.clone() * inv.clone();
        }
        r.insert(pivot, T::one());
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&pivot).cloned() {
                axpy(row, &f, &r);
            }
        }
        self.rows.insert(pivot, r);
        true
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<T>> {
        self.rows.values()
    }
}

/// Rank of the span of `vectors`.
pub fn rank<T: Field>(vectors: &[SparseVec<T>]) -> usize {
    let mut s = Subspace::new();
    vectors.iter().filter(|v| s.insert(v)).count()
}

/// Indices of a maximal independent prefix-greedy subset of `vectors`.
pub fn independent_subset<T: Field>(vectors: &[SparseVec<T>]) -> Vec<usize> {
    let mut s = Subspace::new();
    (0..vectors.len()).filter(|&i| s.insert(&vectors[i])).collect()
}

/// Lead-column elimination tableau that remembers how every stored row was
/// formed from the input columns.
struct Tableau<T: Field> {
    n: usize,
    rows: Vec<(SparseVec<T>, Vec<T>)>,
    pivot_of: BTreeMap<usize, usize>,
}

impl<T: Field> Tableau<T> {
    fn new(n: usize) -> Self {
        Self { n, rows: Vec::new(), pivot_of: BTreeMap::new() }
    }

    /// Eliminates leading entries of `v` while they hit stored pivots.
    fn reduce(&self, v: &mut SparseVec<T>, combo: &mut [T]) {
        while let Some((&lead_col, lead)) = v.iter().next() {
            let Some(&b) = self.pivot_of.get(&lead_col) else {
                break;
            };
            let (bv, bc) = &self.rows[b];
            let f = lead.clone() / bv[&lead_col].clone();
            axpy(v, &f, bv);
            for (c, bci) in combo.iter_mut().zip(bc) {
                if !bci.is_zero() {
                    *c = c.clone() - f.clone() * bci.clone();
                }
            }
        }
    }

    /// Pushes column `j`; returns its kernel combination if it was dependent.
    fn push(&mut self, j: usize, col: &SparseVec<T>) -> Option<Vec<T>> {
        let mut v = col.clone();
        let mut combo = vec![T::zero(); self.n];
        combo[j] = T::one();
        self.reduce(&mut v, &mut combo);
        match v.keys().next().copied() {
            Some(lead_col) => {
                self.pivot_of.insert(lead_col, self.rows.len());
                self.rows.push((v, combo));
                None
            }
            None => Some(combo),
        }
    }
}

/// Basis of `{ y : sum_j y_j * columns[j] = 0 }`.
///
/// `columns[j]` is the image of the j-th unknown; the returned vectors have
/// length `columns.len()`.
pub fn nullspace<T: Field>(columns: &[SparseVec<T>]) -> Vec<Vec<T>> {
    let mut t = Tableau::new(columns.len());
    columns
        .iter()
        .enumerate()
        .filter_map(|(j, c)| t.push(j, c))
        .collect()
}

/// Solves `sum_j y_j * columns[j] = rhs` exactly, returning one solution if the
/// system is consistent.
pub fn solve_in_span<T: Field>(columns: &[SparseVec<T>], rhs: &SparseVec<T>) -> Option<Vec<T>> {
    let mut t = Tableau::new(columns.len());
    for (j, c) in columns.iter().enumerate() {
        t.push(j, c);
    }
    let mut r = rhs.clone();
    let mut combo = vec![T::zero(); columns.len()];
    t.reduce(&mut r, &mut combo);
    if !r.is_empty() {
        return None;
    }
    Some(combo.into_iter().map(|c| -c).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn sv(dense: &[i64]) -> SparseVec<Rational> {
        sparse_from_dense(&dense.iter().map(|&v| q(v)).collect::<Vec<_>>())
    }

    #[test]
    fn rank_of_dependent_set() {
        let vs = vec![sv(&[1, 2, 3]), sv(&[2, 4, 6]), sv(&[0, 1, 1]), sv(&[1, 3, 4])];
        assert_eq!(rank(&vs), 2);
        assert_eq!(independent_subset(&vs), vec![0, 2]);
    }

    #[test]
    fn nullspace_annihilates() {
        let cols = vec![sv(&[1, 0, 1]), sv(&[0, 1, 1]), sv(&[1, 1, 2]), sv(&[2, 0, 2])];
        let ker = nullspace(&cols);
        assert_eq!(ker.len(), 2);
        for y in &ker {
            let mut acc = vec![q(0); 3];
            for (j, c) in cols.iter().enumerate() {
                for (i, v) in c {
                    acc[*i] += y[j].clone() * v.clone();
                }
            }
            assert!(acc.iter().all(|v| *v == q(0)));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let cols = vec![sv(&[1, 0, 1]), sv(&[0, 1, 1])];
        let y = solve_in_span(&cols, &sv(&[2, 3, 5])).unwrap();
        assert_eq!(y, vec![q(2), q(3)]);
        assert!(solve_in_span(&cols, &sv(&[0, 0, 1])).is_none());
    }

    #[test]
    fn subspace_membership() {
        let mut s = Subspace::new();
        assert!(s.insert(&sv(&[0, 2, 0, 4])));
        assert!(s.insert(&sv(&[1, 1, 0, 0])));
        assert!(!s.insert(&sv(&[2, 4, 0, 4])));
        assert!(s.contains(&sv(&[1, 2, 0, 2])));
        assert!(!s.contains(&sv(&[0, 0, 1, 0])));
        assert_eq!(s.dim(), 2);
    }
}
