//! Bases for the pyramid approximation spaces of every form degree.
//!
//! All bases are built in exact arithmetic from spanning sets and reduced to
//! linearly independent lists with first-come pivoting, so the order of every
//! basis is deterministic.

mod decompose;
mod embed;
mod form;
mod reduced;
mod sequence;
mod trace;
mod underlying;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{independent_subset, solve_in_span, Subspace};
use crate::Rational;

pub use decompose::{decompose_exact_weight, ladder_check, LadderEntry};
pub use embed::{polynomial_embed, reference_monomial};
pub use form::{component_count, Coords, FormPoly};
pub use sequence::{exact_sequence_report, SequenceReport};
pub use trace::{face_trace, trace_violation, Face, FacePoly};

/// Which space a basis spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Underlying,
    Conforming,
    Reduced,
    /// The exactly `r`-weighted part of the reduced space.
    ExactWeight(usize),
}

/// An ordered, linearly independent list of forms.
#[derive(Debug)]
pub struct SpaceBasis {
    pub s: usize,
    pub k: usize,
    pub family: Family,
    pub basis: Vec<FormPoly>,
    span: OnceLock<(Coords, Subspace<Rational>)>,
}

impl SpaceBasis {
    fn new(s: usize, k: usize, family: Family, basis: Vec<FormPoly>) -> Self {
        Self { s, k, family, basis, span: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn span(&self) -> &(Coords, Subspace<Rational>) {
        self.span.get_or_init(|| {
            let mut coords = Coords::new();
            let mut sub = Subspace::new();
            for v in coords.vectors(&self.basis) {
                sub.insert(&v);
            }
            (coords, sub)
        })
    }

    pub fn contains(&self, form: &FormPoly) -> bool {
        if form.degree() != self.s {
            return false;
        }
        match self.span().0.lookup(form) {
            Some(v) => self.span().1.contains(&v),
            None => false,
        }
    }

    /// Coefficients of `form` in this basis.
    pub fn coordinates(&self, form: &FormPoly) -> Result<Vec<Rational>> {
        let (coords, _) = self.span();
        let mut c = coords.clone();
        let cols = c.vectors(&self.basis);
        let rhs = c.vector(form);
        solve_in_span(&cols, &rhs).ok_or(Error::NotInSpace)
    }
}

/// Keeps the independent members of a spanning list, in order.
pub(crate) fn dedup(forms: Vec<FormPoly>) -> Vec<FormPoly> {
    let mut coords = Coords::new();
    let vs = coords.vectors(&forms);
    let keep = independent_subset(&vs);
    keep.into_iter().map(|i| forms[i].clone()).collect()
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidOrder(0));
    }
    Ok(())
}

pub fn build_underlying_basis(s: usize, k: usize) -> Result<SpaceBasis> {
    check_order(k)?;
    Ok(SpaceBasis::new(s, k, Family::Underlying, dedup(underlying::spanning_set(s, k)?)))
}

pub fn build_reduced_basis(s: usize, k: usize) -> Result<SpaceBasis> {
    check_order(k)?;
    Ok(SpaceBasis::new(s, k, Family::Reduced, dedup(reduced::spanning_set(s, k)?)))
}

pub fn build_conforming_basis(s: usize, k: usize) -> Result<SpaceBasis> {
    check_order(k)?;
    let u = basis(s, k, Family::Underlying)?;
    Ok(SpaceBasis::new(s, k, Family::Conforming, trace::conforming_subspace(&u.basis, s, k)))
}

pub fn build_exact_weight_basis(s: usize, k: usize, r: usize) -> Result<SpaceBasis> {
    check_order(k)?;
    let red = basis(s, k, Family::Reduced)?;
    let mut parts = Vec::new();
    for f in &red.basis {
        if let Some(p) = decompose_exact_weight(f, &red)?.remove(&(r as i64)) {
            parts.push(p);
        }
    }
    Ok(SpaceBasis::new(s, k, Family::ExactWeight(r), dedup(parts)))
}

type CacheKey = (usize, usize, Family);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<SpaceBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<SpaceBasis>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached basis for `(s, k, family)`.
///
/// Construction happens outside the lock; when two threads race, the first
/// insert wins and both get the same `Arc`.
pub fn basis(s: usize, k: usize, family: Family) -> Result<Arc<SpaceBasis>> {
    if s > 3 {
        return Err(Error::Degree(s));
    }
    let key = (s, k, family);
    if let Some(b) = cache().read().expect("space cache poisoned").get(&key) {
        return Ok(b.clone());
    }
    let built = match family {
        Family::Underlying => build_underlying_basis(s, k)?,
        Family::Reduced => build_reduced_basis(s, k)?,
        Family::Conforming => build_conforming_basis(s, k)?,
        Family::ExactWeight(r) => build_exact_weight_basis(s, k, r)?,
    };
    let mut w = cache().write().expect("space cache poisoned");
    Ok(w.entry(key).or_insert_with(|| Arc::new(built)).clone())
}
