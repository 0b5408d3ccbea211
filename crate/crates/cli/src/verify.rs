//! The invariant suite behind `pyrafem verify`.

use num_traits::{One, ToPrimitive, Zero};
use pyrafem::element::{analytic_with_products, local_bilinear_matrix, reference_products, CoefficientTensor, LocalBasis};
use pyrafem::geometry::AffinePyramid;
use pyrafem::quadrature::conical_rule;
use pyrafem::spaces::*;
use pyrafem::{Rational, RationalPoly, SpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub worst_residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub k_max: usize,
    pub seed: u64,
    pub all_pass: bool,
    /// Worst entry residual of the bilinear-form exactness check.
    pub theorem_3_1_max_residual: f64,
    pub checks: Vec<Check>,
}

fn check(name: &str, pass: bool, worst_residual: f64, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, worst_residual, detail: detail.into() }
}

fn exact(name: &str, failures: Vec<String>, count: usize) -> Check {
    let detail = match failures.first() {
        None => format!("{count} cases"),
        Some(f) => format!("{} of {count} failed, first: {f}", failures.len()),
    };
    check(name, failures.is_empty(), if failures.is_empty() { 0.0 } else { 1.0 }, detail)
}

fn dyadic(rng: &mut ChaCha8Rng, span: i64) -> Rational {
    Rational::new(rng.gen_range(-span..=span).into(), 16.into())
}

fn random_pyramid(rng: &mut ChaCha8Rng) -> AffinePyramid<Rational> {
    loop {
        let mut v = || [dyadic(rng, 4), dyadic(rng, 4), dyadic(rng, 4)];
        let (v0, mut e1, mut e2, mut ap) = (v(), v(), v(), v());
        e1[0] += Rational::one();
        e2[1] += Rational::one();
        ap[2] += Rational::one();
        for t in 0..3 {
            ap[t] += &v0[t];
        }
        if let Ok(k) = AffinePyramid::new(v0, e1, e2, ap) {
            return k;
        }
    }
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    let l: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| dyadic(rng, 16)).collect()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = (0..n).fold(Rational::zero(), |acc, m| acc + &l[i][m] * &l[j][m]);
                    if i == j {
                        v + Rational::one()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

fn quadrature_exactness(k_max: usize) -> Check {
    let kr = AffinePyramid::<f64>::reference();
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in 0..=k_max {
        let rule = conical_rule::<f64>(k).expect("valid order");
        let top = 2 * k as u32 + 1;
        for a in 0..=top {
            for b in 0..=top {
                for c in 0..=top as i64 {
                    let p = RationalPoly::monomial(a, b, c);
                    let e = p.integrate_reference().map(|v| v.to_f64().unwrap_or(f64::NAN)).unwrap_or(f64::NAN);
                    let q = rule.integrate_poly(&p, &kr).unwrap_or(f64::NAN);
                    worst = worst.max(((q - e).abs() / e.abs().max(1.0)).max(if q.is_finite() { 0.0 } else { 1.0 }));
                    count += 1;
                }
            }
        }
    }
    check("quadrature_exactness", worst <= 1e-13, worst, format!("{count} monomials, k = 0..{k_max}"))
}

/// Worst entry error relative to the entry, with entries below `1e-2` of the
/// matrix scale measured against that floor.
fn gram_residual(s: usize, k: usize, reduced: bool, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (97 * s as u64 + 13 * k as u64));
    let b = LocalBasis::get(s, k, Family::Underlying).map_err(|e| e.to_string())?;
    let products = reference_products(&b.space).map_err(|e| e.to_string())?;
    let rule = pyrafem::quadrature::rule_for_pair::<f64>(k, s, reduced).map_err(|e| e.to_string())?;
    let mut pyramids = vec![AffinePyramid::reference()];
    pyramids.push(random_pyramid(&mut rng));
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let a = random_spd(&mut rng, component_count(s));
        let af: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect();
        let coeff = CoefficientTensor::constant(s, af).map_err(|e| e.to_string())?;
        for kr in &pyramids {
            let e = analytic_with_products(s, &products, &a, kr).map_err(|e| e.to_string())?;
            let m = local_bilinear_matrix(&b, &coeff, &kr.map_scalar(|v| v.to_f64().unwrap_or(f64::NAN)), &rule)
                .map_err(|e| e.to_string())?;
            let e: Vec<Vec<f64>> = e.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect();
            let scale = e.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
            for (i, row) in e.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    worst = worst.max((m[(i, j)] - v).abs() / v.abs().max(1e-2 * scale));
                }
            }
        }
    }
    Ok(worst)
}

fn bilinear_exactness(k_max: usize, seed: u64) -> Check {
    let mut cases = Vec::new();
    for s in 0..4 {
        for k in 1..=k_max {
            cases.push((s, k, false));
        }
    }
    for k in 1..=k_max {
        cases.push((3, k, true));
    }
    let results: Vec<Result<f64, String>> =
        cases.par_iter().map(|&(s, k, reduced)| gram_residual(s, k, reduced, seed)).collect();
    let mut worst = 0.0f64;
    for r in &results {
        match r {
            Ok(w) => worst = worst.max(*w),
            Err(e) => return check("bilinear_exactness", false, f64::INFINITY, e.clone()),
        }
    }
    check(
        "bilinear_exactness",
        worst <= 1e-12,
        worst,
        format!("{} (s, k) cases, 2 SPD tensors x 2 pyramids each, s = 3 also with the order k - 1 rule", cases.len()),
    )
}

type Structural = fn(usize, usize) -> Result<Vec<String>, pyrafem::Error>;

fn structural(name: &str, k_max: usize, f: Structural) -> Check {
    let pairs: Vec<(usize, usize)> = (1..=k_max).flat_map(|k| (0..4).map(move |s| (s, k))).collect();
    let results: Vec<_> = pairs.par_iter().map(|&(s, k)| f(s, k)).collect();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(f) => failures.extend(f),
            Err(e) => failures.push(e.to_string()),
        }
    }
    exact(name, failures, pairs.len())
}

fn pullback(s: usize, k: usize) -> Result<Vec<String>, pyrafem::Error> {
    let ki = k as i64;
    let q = SpaceSpec::Tensor { l: ki, m: ki, n: ki, k: ki };
    Ok(basis(s, k, Family::Underlying)?
        .basis
        .iter()
        .filter(|f| !f.pullback_components().iter().all(|c| c.is_member(&q)))
        .map(|f| format!("s={s} k={k} {f:?}"))
        .collect())
}

fn inclusion(s: usize, k: usize) -> Result<Vec<String>, pyrafem::Error> {
    let (u, c, r) = (basis(s, k, Family::Underlying)?, basis(s, k, Family::Conforming)?, basis(s, k, Family::Reduced)?);
    let mut out = Vec::new();
    if !r.basis.iter().all(|f| c.contains(f)) {
        out.push(format!("R not in conforming, s={s} k={k}"));
    }
    if !c.basis.iter().all(|f| u.contains(f)) {
        out.push(format!("conforming not in U, s={s} k={k}"));
    }
    if !r.basis.iter().all(|f| trace_violation(f, k).is_empty()) {
        out.push(format!("trace violation in R, s={s} k={k}"));
    }
    Ok(out)
}

fn embedding(s: usize, k: usize) -> Result<Vec<String>, pyrafem::Error> {
    let r = basis(s, k, Family::Reduced)?;
    let max = if s == 0 { k } else { k - 1 } as u32;
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=max - a {
            for c in 0..=max - a - b {
                for i in 0..component_count(s) {
                    let mut hat = vec![RationalPoly::zero(); component_count(s)];
                    hat[i] = reference_monomial(a, b, c);
                    let f = polynomial_embed(s, k, &hat)?;
                    if !r.contains(&f) || f.pullback_components() != hat {
                        out.push(format!("s={s} k={k} component {i} ({a},{b},{c})"));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn decomposition(s: usize, k: usize) -> Result<Vec<String>, pyrafem::Error> {
    let r = basis(s, k, Family::Reduced)?;
    let mut out = Vec::new();
    let mut sum = 0;
    for w in 0..=k {
        sum += basis(s, k, Family::ExactWeight(w))?.dim();
    }
    if sum != r.dim() {
        out.push(format!("s={s} k={k}: sum of dims {sum} != {}", r.dim()));
    }
    for f in &r.basis {
        let parts = decompose_exact_weight(f, &r)?;
        if &parts.values().fold(FormPoly::zero(s), |acc, p| acc.add(p)) != f {
            out.push(format!("s={s} k={k}: parts do not sum to {f:?}"));
        }
    }
    Ok(out)
}

fn sequence(k_max: usize) -> Check {
    let mut failures = Vec::new();
    for k in 1..=k_max {
        match exact_sequence_report(k) {
            Ok(rep) if rep.exact() => {}
            Ok(rep) => failures.push(format!("{rep:?}")),
            Err(e) => failures.push(e.to_string()),
        }
    }
    exact("exact_sequence", failures, k_max)
}

fn ladder(k_max: usize) -> Check {
    let mut failures = Vec::new();
    let mut count = 0;
    for k in 1..=k_max {
        match ladder_check(k) {
            Ok(rows) => {
                for row in rows {
                    count += 1;
                    let order: u32 = row.gamma.iter().sum();
                    let ok = match row.c_min {
                        Some(c) => row.integrable == (c > -3) && row.integrable == row.regularity_bound,
                        None => row.integrable,
                    } && (order as usize > row.r || row.integrable);
                    if !ok {
                        failures.push(format!("{row:?}"));
                    }
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    exact("integrability_ladder", failures, count)
}

pub fn run(k_max: usize, seed: u64) -> VerifyReport {
    let bilinear = bilinear_exactness(k_max, seed);
    let checks = vec![
        structural("pullback_weights", k_max, pullback),
        quadrature_exactness(k_max),
        bilinear.clone(),
        structural("inclusions", k_max, inclusion),
        structural("polynomial_embedding", k_max, embedding),
        structural("decomposition", k_max, decomposition),
        sequence(k_max),
        ladder(k_max),
    ];
    VerifyReport {
        command: "verify",
        k_max,
        seed,
        all_pass: checks.iter().all(|c| c.pass),
        theorem_3_1_max_residual: bilinear.worst_residual,
        checks,
    }
}
