//! Best m-term error functionals, computed exactly by subset enumeration.
//!
//! The outer minimization over index sets is brute force. The inner one over
//! coefficients has a closed form for absolute norms (keep `a_i = x_i`, since
//! then `‖x − Σ_A a_i e_i‖ ≥ ‖P_{A^c} x‖`), and falls back to
//! [`pattern_descent`](crate::minimize::pattern_descent) otherwise.
//!
//! Sided functionals restrict the competing set to the left of `α_m(x)` or to
//! the right of `β_m(x)`. When no set of the required size fits, the
//! infimum is over an empty family and the value is `None` (infeasible).

use itertools::Itertools;
use serde::Serialize;

use crate::error::{check_range, Result};
use crate::greedy::greedy_ordering;
use crate::minimize::{golden_section, pattern_descent};
use crate::space::NormedSpace;
use crate::vector::{IndexSet, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Functional {
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "sigma_tilde")]
    SigmaTilde,
    #[serde(rename = "sigma_L")]
    SigmaLeft,
    #[serde(rename = "sigma_R")]
    SigmaRight,
    #[serde(rename = "sigma_tilde_L")]
    SigmaTildeLeft,
    #[serde(rename = "sigma_tilde_R")]
    SigmaTildeRight,
    #[serde(rename = "dist_indicator")]
    DistIndicator,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Sigma => "sigma",
            Functional::SigmaTilde => "sigma_tilde",
            Functional::SigmaLeft => "sigma_L",
            Functional::SigmaRight => "sigma_R",
            Functional::SigmaTildeLeft => "sigma_tilde_L",
            Functional::SigmaTildeRight => "sigma_tilde_R",
            Functional::DistIndicator => "dist_indicator",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorValue {
    pub functional: Functional,
    /// `None` when the admissible family is empty (the infimum is `+∞`).
    pub value: Option<f64>,
    pub witness_set: IndexSet,
    /// Coefficients on `witness_set` (for σ-type functionals), or the scalar
    /// `a` repeated (for the indicator distance).
    pub witness_coeffs: Option<Vec<f64>>,
}

impl ErrorValue {
    pub fn is_infeasible(&self) -> bool {
        self.value.is_none()
    }

    pub fn value_or_inf(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }

    fn infeasible(functional: Functional) -> Self {
        Self {
            functional,
            value: None,
            witness_set: IndexSet::empty(),
            witness_coeffs: None,
        }
    }

    /// The approximant `Σ_A a_i e_i` (or `a·1_A`) this witness describes.
    pub fn approximant(&self, dim: usize) -> Vector {
        let mut v = vec![0.0; dim];
        if let Some(c) = &self.witness_coeffs {
            for (&i, &a) in self.witness_set.iter().zip(c) {
                v[i] = a;
            }
        }
        Vector::new(v).expect("finite witness")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Both,
    Left,
    Right,
    Unconstrained,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetSize {
    Exactly(usize),
    AtMost(usize),
}

/// How the coefficients on the competing set are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// `P_A(x)`.
    Projection,
    /// Free real coefficients.
    Free,
}

/// Indices strictly left of `alpha` (all indices when `alpha` is `None`).
pub fn left_pool(dim: usize, alpha: Option<usize>) -> Vec<usize> {
    (0..alpha.unwrap_or(dim)).collect()
}

/// Indices strictly right of `beta` (all indices when `beta` is `None`).
pub fn right_pool(dim: usize, beta: Option<usize>) -> Vec<usize> {
    (beta.map_or(0, |b| b + 1)..dim).collect()
}

/// `min_a ‖x − Σ_{i∈set} a_i e_i‖` (free) or `‖x − P_set x‖` (projection).
pub fn best_on_set<N: NormedSpace + ?Sized>(
    space: &N,
    x: &[f64],
    set: &[usize],
    coefficients: Coefficients,
) -> (f64, Vec<f64>) {
    let mut r = x.to_vec();
    for &i in set {
        r[i] = 0.0;
    }
    let kept: Vec<f64> = set.iter().map(|&i| x[i]).collect();
    let projected = space.eval(&r);
    if coefficients == Coefficients::Projection || space.is_absolute() || set.is_empty() {
        return (projected, kept);
    }
    let scale = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let objective = |a: &[f64]| {
        let mut y = x.to_vec();
        for (&i, &ai) in set.iter().zip(a) {
            y[i] -= ai;
        }
        space.eval(&y)
    };
    let (a, fa) = pattern_descent(objective, kept.clone(), 2.0 * scale + 1.0);
    if fa < projected {
        (fa, a)
    } else {
        (projected, kept)
    }
}

/// Candidate competing sets drawn from `pool`.
///
/// For absolute norms `‖P_{A^c} x‖` only shrinks as `A` grows, so an
/// at-most-`k` family is reduced to its maximal members.
pub fn candidate_sets(pool: &[usize], size: SetSize, absolute: bool) -> Vec<Vec<usize>> {
    match size {
        SetSize::Exactly(k) => pool.iter().copied().combinations(k).collect(),
        SetSize::AtMost(k) if absolute => pool
            .iter()
            .copied()
            .combinations(k.min(pool.len()))
            .collect(),
        SetSize::AtMost(k) => (0..=k.min(pool.len()))
            .flat_map(|s| pool.iter().copied().combinations(s))
            .collect(),
    }
}

/// Minimizes [`best_on_set`] over the given sets; `None` if there are none.
pub fn minimize_over_sets<N: NormedSpace + ?Sized>(
    space: &N,
    x: &[f64],
    sets: impl IntoIterator<Item = Vec<usize>>,
    coefficients: Coefficients,
    functional: Functional,
) -> ErrorValue {
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for set in sets {
        let (v, a) = best_on_set(space, x, &set, coefficients);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, set, a));
        }
    }
    match best {
        None => ErrorValue::infeasible(functional),
        Some((v, set, a)) => ErrorValue {
            functional,
            value: Some(v),
            witness_set: IndexSet::new(set),
            witness_coeffs: Some(a),
        },
    }
}

fn best_in_pool<N: NormedSpace + ?Sized>(
    space: &N,
    x: &[f64],
    pool: &[usize],
    size: SetSize,
    coefficients: Coefficients,
    functional: Functional,
) -> ErrorValue {
    let absolute = space.is_absolute();
    minimize_over_sets(
        space,
        x,
        candidate_sets(pool, size, absolute),
        coefficients,
        functional,
    )
}

fn check_inputs<N: NormedSpace + ?Sized>(space: &N, x: &Vector, m: usize) -> Result<()> {
    if x.dim() != space.dim() {
        return Err(crate::error::Error::DimensionMismatch {
            expected: space.dim(),
            found: x.dim(),
        });
    }
    check_range("m", m, 0, space.dim())
}

/// `σ_m(x)`: best m-term approximation error with free coefficients.
pub fn sigma<N: NormedSpace + ?Sized>(space: &N, x: &Vector, m: usize) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    let pool: Vec<usize> = (0..space.dim()).collect();
    Ok(best_in_pool(
        space,
        x.coeffs(),
        &pool,
        SetSize::Exactly(m),
        Coefficients::Free,
        Functional::Sigma,
    ))
}

/// `σ̃_m(x)`: best projection onto at most `m` basis vectors.
pub fn sigma_tilde<N: NormedSpace + ?Sized>(space: &N, x: &Vector, m: usize) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    let pool: Vec<usize> = (0..space.dim()).collect();
    Ok(best_in_pool(
        space,
        x.coeffs(),
        &pool,
        SetSize::AtMost(m),
        Coefficients::Projection,
        Functional::SigmaTilde,
    ))
}

/// `σ_m^L(x)` for an explicit `α_m(x)`.
pub fn sigma_left_with<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    alpha: Option<usize>,
) -> ErrorValue {
    let pool = left_pool(space.dim(), alpha);
    best_in_pool(
        space,
        x.coeffs(),
        &pool,
        SetSize::Exactly(m),
        Coefficients::Free,
        Functional::SigmaLeft,
    )
}

/// `σ_m^R(x)` for an explicit `β_m(x)`.
pub fn sigma_right_with<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    beta: Option<usize>,
) -> ErrorValue {
    let pool = right_pool(space.dim(), beta);
    best_in_pool(
        space,
        x.coeffs(),
        &pool,
        SetSize::Exactly(m),
        Coefficients::Free,
        Functional::SigmaRight,
    )
}

/// `σ̃_m^L(x)` for an explicit `α_m(x)`.
pub fn sigma_tilde_left_with<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    alpha: Option<usize>,
) -> ErrorValue {
    let pool = left_pool(space.dim(), alpha);
    best_in_pool(
        space,
        x.coeffs(),
        &pool,
        SetSize::AtMost(m),
        Coefficients::Projection,
        Functional::SigmaTildeLeft,
    )
}

/// `σ̃_m^R(x)` for an explicit `β_m(x)`.
pub fn sigma_tilde_right_with<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    beta: Option<usize>,
) -> ErrorValue {
    let pool = right_pool(space.dim(), beta);
    best_in_pool(
        space,
        x.coeffs(),
        &pool,
        SetSize::AtMost(m),
        Coefficients::Projection,
        Functional::SigmaTildeRight,
    )
}

fn canonical_bounds(x: &Vector, m: usize) -> (Option<usize>, Option<usize>) {
    let sel = greedy_ordering(x).at(m).expect("m checked by caller");
    (sel.alpha(), sel.beta())
}

pub fn sigma_left<N: NormedSpace + ?Sized>(space: &N, x: &Vector, m: usize) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    Ok(sigma_left_with(space, x, m, canonical_bounds(x, m).0))
}

pub fn sigma_right<N: NormedSpace + ?Sized>(space: &N, x: &Vector, m: usize) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    Ok(sigma_right_with(space, x, m, canonical_bounds(x, m).1))
}

pub fn sigma_tilde_left<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    Ok(sigma_tilde_left_with(space, x, m, canonical_bounds(x, m).0))
}

pub fn sigma_tilde_right<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    Ok(sigma_tilde_right_with(
        space,
        x,
        m,
        canonical_bounds(x, m).1,
    ))
}

/// Competing sets `A` with `|A| ≤ m` and `|A ∩ lambda| ≤ overlap`.
pub fn overlap_sets(
    dim: usize,
    lambda: &IndexSet,
    overlap: usize,
    m: usize,
    absolute: bool,
) -> Vec<Vec<usize>> {
    let inside: Vec<usize> = lambda.iter().copied().collect();
    let outside: Vec<usize> = (0..dim).filter(|&i| !lambda.contains(i)).collect();
    let mut out = Vec::new();
    for j in 0..=overlap.min(inside.len()).min(m) {
        let rest = m - j;
        let outer_sizes: Vec<usize> = if absolute {
            vec![rest.min(outside.len())]
        } else {
            (0..=rest.min(outside.len())).collect()
        };
        for a_in in inside.iter().copied().combinations(j) {
            for &k in &outer_sizes {
                for a_out in outside.iter().copied().combinations(k) {
                    let mut s = a_in.clone();
                    s.extend(a_out);
                    s.sort_unstable();
                    out.push(s);
                }
            }
        }
    }
    out
}

/// `min_a ‖x − a·1_A‖` by golden-section search on `a ∈ [−max|x_i|, max|x_i|]`.
pub fn indicator_distance<N: NormedSpace + ?Sized>(
    space: &N,
    x: &[f64],
    set: &[usize],
) -> (f64, f64) {
    let bound = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if set.is_empty() || bound == 0.0 {
        return (space.eval(x), 0.0);
    }
    let mut y = x.to_vec();
    let f = |a: f64| {
        // y is rebuilt per evaluation
        let mut z = x.to_vec();
        for &i in set {
            z[i] -= a;
        }
        space.eval(&z)
    };
    let (a, v) = golden_section(f, -bound, bound, 1e-10);
    for &i in set {
        y[i] -= a;
    }
    (v, a)
}

/// Minimizes [`indicator_distance`] over the given sets.
pub fn min_indicator_distance<N: NormedSpace + ?Sized>(
    space: &N,
    x: &[f64],
    sets: impl IntoIterator<Item = Vec<usize>>,
) -> ErrorValue {
    let mut best: Option<(f64, Vec<usize>, f64)> = None;
    for set in sets {
        let (v, a) = indicator_distance(space, x, &set);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, set, a));
        }
    }
    match best {
        None => ErrorValue::infeasible(Functional::DistIndicator),
        Some((v, set, a)) => ErrorValue {
            functional: Functional::DistIndicator,
            value: Some(v),
            witness_coeffs: Some(vec![a; set.len()]),
            witness_set: IndexSet::new(set),
        },
    }
}

fn all_subsets_up_to(pool: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..=k.min(pool.len())).flat_map(move |s| pool.iter().copied().combinations(s))
}

/// `d(x, a·1_A)` minimized over admissible `A` and scalar `a`, for explicit
/// `α`/`β`. Sided variants admit `|A| ≤ m` (so `A = ∅` is always allowed);
/// the unconstrained variant requires `|A| = m`.
pub fn dist_indicator_with<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    side: Side,
    alpha: Option<usize>,
    beta: Option<usize>,
) -> ErrorValue {
    let d = space.dim();
    let c = x.coeffs();
    match side {
        Side::Unconstrained => {
            let pool: Vec<usize> = (0..d).collect();
            min_indicator_distance(space, c, pool.iter().copied().combinations(m))
        }
        Side::Left => {
            let pool = left_pool(d, alpha);
            min_indicator_distance(space, c, all_subsets_up_to(&pool, m))
        }
        Side::Right => {
            let pool = right_pool(d, beta);
            min_indicator_distance(space, c, all_subsets_up_to(&pool, m))
        }
        Side::Both => {
            let l = dist_indicator_with(space, x, m, Side::Left, alpha, beta);
            let r = dist_indicator_with(space, x, m, Side::Right, alpha, beta);
            if r.value_or_inf() < l.value_or_inf() {
                r
            } else {
                l
            }
        }
    }
}

pub fn dist_indicator<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    side: Side,
) -> Result<ErrorValue> {
    check_inputs(space, x, m)?;
    let (alpha, beta) = canonical_bounds(x, m);
    Ok(dist_indicator_with(space, x, m, side, alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn l1(d: usize) -> SpaceSpec {
        SpaceSpec::lp(d, 1.0).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let s = l1(4);
        let x = v(&[4.0, 3.0, 2.0, 1.0]);
        let e = sigma(&s, &x, 2).unwrap();
        assert_eq!(e.value, Some(3.0));
        assert_eq!(e.witness_set, IndexSet::new(vec![0, 1]));
        assert_eq!(sigma(&s, &x, 0).unwrap().value, Some(10.0));
        assert_eq!(sigma(&s, &x, 4).unwrap().value, Some(0.0));
        assert_eq!(sigma_tilde(&s, &x, 2).unwrap().value, Some(3.0));
        assert_eq!(sigma_tilde(&s, &x, 0).unwrap().value, Some(10.0));
        assert!(sigma(&s, &x, 5).is_err());
    }

    #[test]
    fn sided_examples() {
        let s = l1(4);
        let e = sigma_left(&s, &v(&[0.0, 0.0, 5.0, 1.0]), 1).unwrap();
        assert_eq!(e.value, Some(6.0));
        assert!(sigma_left(&s, &v(&[5.0, 1.0, 0.0, 0.0]), 2)
            .unwrap()
            .is_infeasible());
        assert!(sigma_right(&l1(2), &v(&[1.0, 5.0]), 1)
            .unwrap()
            .is_infeasible());
        let e = sigma_tilde_left(&s, &v(&[2.0, 0.0, 5.0, 0.0]), 1).unwrap();
        assert_eq!(e.value, Some(5.0));
        assert_eq!(e.witness_set, IndexSet::new(vec![0]));
        let x = v(&[9.0, 1.0, 2.0, 3.0]);
        assert_eq!(sigma_tilde_left(&s, &x, 1).unwrap().value, Some(15.0));
        assert!(
            sigma_tilde_right(&s, &v(&[1.0, 5.0, 0.0, 0.0]), 1)
                .unwrap()
                .value
                .unwrap()
                <= 6.0
        );
    }

    #[test]
    fn dist_examples() {
        let s = l1(4);
        let b = IndexSet::new(vec![1, 3]);
        let x = Vector::scaled_indicator(4, &b, 5.0);
        let e = dist_indicator(&s, &x, 2, Side::Unconstrained).unwrap();
        assert!(e.value.unwrap() < 1e-9);
        assert!((e.witness_coeffs.unwrap()[0] - 5.0).abs() < 1e-8);
        // Frozen by brute force over pairs × a-grid in tests/oracles.rs.
        let e = dist_indicator(&s, &v(&[4.0, 3.0, 2.0, 1.0]), 2, Side::Unconstrained).unwrap();
        assert!((e.value.unwrap() - 4.0).abs() < 1e-9);
        for side in [Side::Left, Side::Right, Side::Both] {
            let x = v(&[0.5, -2.0, 1.0, 0.25]);
            assert!(dist_indicator(&s, &x, 1, side).unwrap().value.unwrap() <= 3.75 + 1e-12);
        }
    }

    #[test]
    fn witness_reproduces_value() {
        let s = SpaceSpec::example(2).unwrap();
        let x = v(&[0.5, -1.5, 2.0, 0.75]);
        for m in 0..=4 {
            for e in [
                sigma(&s, &x, m).unwrap(),
                sigma_tilde(&s, &x, m).unwrap(),
                dist_indicator(&s, &x, m, Side::Unconstrained).unwrap(),
            ] {
                let r = x.sub(&e.approximant(4));
                assert!((s.norm(&r).unwrap() - e.value.unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn overlap_sets_respect_budget() {
        let lambda = IndexSet::new(vec![0, 1]);
        let sets = overlap_sets(5, &lambda, 1, 2, true);
        assert!(sets.iter().all(|s| s.len() == 2));
        assert!(sets
            .iter()
            .all(|s| s.iter().filter(|&&i| i < 2).count() <= 1));
        assert_eq!(sets.len(), 3 + 2 * 3);
        let general = overlap_sets(5, &lambda, 0, 2, false);
        assert!(general.contains(&vec![]));
    }

    #[test]
    fn non_absolute_norm_uses_descent() {
        struct Summing;
        impl NormedSpace for Summing {
            fn dim(&self) -> usize {
                3
            }
            fn eval(&self, x: &[f64]) -> f64 {
                let mut s: f64 = 0.0;
                let mut best = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
                for v in x {
                    s += v;
                    best = best.max(s.abs());
                }
                best
            }
        }
        let x = v(&[1.0, -1.0, 0.5]);
        let e = sigma(&Summing, &x, 1).unwrap();
        let r = x.sub(&e.approximant(3));
        assert!((Summing.eval(r.coeffs()) - e.value.unwrap()).abs() < 1e-12);
        assert!(e.value.unwrap() <= sigma_tilde(&Summing, &x, 1).unwrap().value.unwrap() + 1e-12);
    }
}
