//! Fundamental function, democracy-type constants and greedy-type constants.
//!
//! Set-based constants are exact over the enumerated size range; the
//! estimate records whether that range covers every admissible pair.
//! Vector-based constants are suprema over a corpus and hence lower bounds,
//! except where the value is forced (absolute norms).

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::functionals::{
    best_on_set, candidate_sets, left_pool, minimize_over_sets, right_pool, sigma, sigma_left,
    sigma_right, sigma_tilde, sigma_tilde_left, sigma_tilde_right, Coefficients, ErrorValue,
    Functional, SetSize,
};
use crate::greedy::{greedy_ordering, tga};
use crate::space::NormedSpace;
use crate::vector::{IndexSet, Vector};

/// Values below this are treated as zero denominators.
pub const ZERO_DENOMINATOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstWitness {
    /// `‖1_a‖ / ‖1_b‖` attains the value.
    Sets { a: IndexSet, b: IndexSet },
    /// A vector and cut `m`; `set` is the competing set when relevant.
    Vector {
        x: Vec<f64>,
        m: usize,
        set: Option<IndexSet>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Budget {
    pub size_cap: Option<usize>,
    pub corpus: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub kind: String,
    pub value: f64,
    pub exactness: Exactness,
    pub witness: Option<ConstWitness>,
    pub budget: Budget,
    /// Instances skipped for infeasible or zero denominators.
    pub skipped: usize,
}

fn indicator_norm<N: NormedSpace + ?Sized>(space: &N, set: &[usize]) -> f64 {
    let mut v = vec![0.0; space.dim()];
    for &i in set {
        v[i] = 1.0;
    }
    space.eval(&v)
}

/// `φ(n) = max_{|A| ≤ n} ‖1_A‖` with a maximizing set.
pub fn fundamental_function<N: NormedSpace + ?Sized>(
    space: &N,
    n: usize,
) -> Result<(f64, IndexSet)> {
    check_range("n", n, 0, space.dim())?;
    let sizes: Vec<usize> = if space.is_absolute() {
        vec![n]
    } else {
        (0..=n).collect()
    };
    let mut best = (0.0, IndexSet::empty());
    for s in sizes {
        for set in (0..space.dim()).combinations(s) {
            let v = indicator_norm(space, &set);
            if v > best.0 {
                best = (v, IndexSet::new(set));
            }
        }
    }
    Ok(best)
}

/// Norms `‖1_A‖` for every `A` with `|A| ≤ cap`, in size-then-lexicographic
/// order.
pub struct IndicatorTable {
    pub dim: usize,
    pub cap: usize,
    /// `entries[k]` lists the `k`-sets with their norms.
    pub entries: Vec<Vec<(Vec<usize>, f64)>>,
}

impl IndicatorTable {
    pub fn build<N: NormedSpace + ?Sized>(space: &N, cap: usize) -> Result<Self> {
        let dim = space.dim();
        check_range("size cap", cap, 1, dim)?;
        let entries = (0..=cap)
            .map(|k| {
                let sets: Vec<Vec<usize>> = (0..dim).combinations(k).collect();
                sets.into_par_iter()
                    .map(|s| {
                        let v = indicator_norm(space, &s);
                        (s, v)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { dim, cap, entries })
    }

    /// Largest `‖1_A‖` among `k`-sets accepted by `keep`; ties go to the
    /// lexicographically last set.
    fn max_of(&self, k: usize, keep: impl Fn(&[usize]) -> bool) -> Option<(f64, &[usize])> {
        let mut best: Option<(f64, &[usize])> = None;
        for (s, v) in &self.entries[k] {
            if keep(s) && best.is_none_or(|b| *v >= b.0) {
                best = Some((*v, s));
            }
        }
        best
    }

    /// Smallest `‖1_B‖` among `k`-sets accepted by `keep`; ties go to the
    /// lexicographically first set.
    fn min_of(&self, k: usize, keep: impl Fn(&[usize]) -> bool) -> Option<(f64, &[usize])> {
        let mut best: Option<(f64, &[usize])> = None;
        for (s, v) in &self.entries[k] {
            if keep(s) && best.is_none_or(|b| *v < b.0) {
                best = Some((*v, s));
            }
        }
        best
    }
}

/// Largest ratio `‖1_A‖/‖1_B‖` over `1 ≤ |A| ≤ |B| ≤ cap` with `A` drawn
/// from sets accepted by `keep_a` and `B` from `keep_b`.
fn ratio_search(
    table: &IndicatorTable,
    keep_a: impl Fn(&[usize]) -> bool + Copy,
    keep_b: impl Fn(&[usize]) -> bool + Copy,
) -> (f64, Option<(IndexSet, IndexSet)>) {
    // num[k]: best A with |A| ≤ k. den[k]: best B with |B| ≥ k.
    let cap = table.cap;
    let mut num: Vec<Option<(f64, &[usize])>> = vec![None; cap + 1];
    for k in 1..=cap {
        let here = table.max_of(k, keep_a);
        num[k] = match (num[k - 1], here) {
            (Some(p), Some(h)) => Some(if h.0 >= p.0 { h } else { p }),
            (p, h) => h.or(p),
        };
    }
    let mut den: Vec<Option<(f64, &[usize])>> = vec![None; cap + 2];
    for k in (1..=cap).rev() {
        let here = table.min_of(k, keep_b);
        den[k] = match (den[k + 1], here) {
            (Some(p), Some(h)) => Some(if h.0 <= p.0 { h } else { p }),
            (p, h) => h.or(p),
        };
    }
    let mut best = (0.0, None);
    for k in 1..=cap {
        if let (Some(a), Some(b)) = (num[k], den[k]) {
            if b.0 > 0.0 && a.0 / b.0 > best.0 {
                best = (
                    a.0 / b.0,
                    Some((IndexSet::new(a.1.to_vec()), IndexSet::new(b.1.to_vec()))),
                );
            }
        }
    }
    best
}

fn set_estimate(
    kind: &str,
    table: &IndicatorTable,
    exact: bool,
    found: (f64, Option<(IndexSet, IndexSet)>),
) -> ConstantEstimate {
    ConstantEstimate {
        kind: kind.into(),
        value: found.0,
        exactness: if exact {
            Exactness::Exact
        } else {
            Exactness::LowerBound
        },
        witness: found.1.map(|(a, b)| ConstWitness::Sets { a, b }),
        budget: Budget {
            size_cap: Some(table.cap),
            corpus: None,
            seed: None,
        },
        skipped: 0,
    }
}

/// Democratic constant `Γ` over `|A| ≤ |B| ≤ cap`.
pub fn democratic_constant_from(table: &IndicatorTable) -> ConstantEstimate {
    let found = ratio_search(table, |_| true, |_| true);
    set_estimate("democratic", table, table.cap >= table.dim, found)
}

/// Splits candidates by a cut point `s`: `A ⊆ [0, s)` and `B ⊆ [s, d)`.
fn split_search(table: &IndicatorTable, a_left: bool) -> (f64, Option<(IndexSet, IndexSet)>) {
    let mut best: (f64, Option<(IndexSet, IndexSet)>) = (0.0, None);
    for s in 1..table.dim {
        let left = move |x: &[usize]| x.iter().all(|&i| i < s);
        let right = move |x: &[usize]| x.iter().all(|&i| i >= s);
        let found = if a_left {
            ratio_search(table, left, right)
        } else {
            ratio_search(table, right, left)
        };
        if found.0 > best.0 {
            best = found;
        }
    }
    best
}

fn split_exact(table: &IndicatorTable, absolute: bool) -> bool {
    // For absolute norms the minimizing B has |B| = |A| ≤ d/2.
    if absolute {
        2 * table.cap >= table.dim
    } else {
        table.cap + 1 >= table.dim
    }
}

/// Conservative constant `Γ_c`: `A < B`, `|A| ≤ |B| ≤ cap`.
pub fn conservative_constant_from(table: &IndicatorTable, absolute: bool) -> ConstantEstimate {
    let found = split_search(table, true);
    set_estimate("conservative", table, split_exact(table, absolute), found)
}

/// Reverse conservative constant `Γ_r`: `B < A`, `|A| ≤ |B| ≤ cap`.
pub fn reverse_conservative_constant_from(
    table: &IndicatorTable,
    absolute: bool,
) -> ConstantEstimate {
    let found = split_search(table, false);
    set_estimate(
        "reverse_conservative",
        table,
        split_exact(table, absolute),
        found,
    )
}

pub fn democratic_constant<N: NormedSpace + ?Sized>(
    space: &N,
    size_cap: usize,
) -> Result<ConstantEstimate> {
    Ok(democratic_constant_from(&IndicatorTable::build(
        space, size_cap,
    )?))
}

pub fn conservative_constant<N: NormedSpace + ?Sized>(
    space: &N,
    size_cap: usize,
) -> Result<ConstantEstimate> {
    let table = IndicatorTable::build(space, size_cap)?;
    Ok(conservative_constant_from(&table, space.is_absolute()))
}

pub fn reverse_conservative_constant<N: NormedSpace + ?Sized>(
    space: &N,
    size_cap: usize,
) -> Result<ConstantEstimate> {
    let table = IndicatorTable::build(space, size_cap)?;
    Ok(reverse_conservative_constant_from(
        &table,
        space.is_absolute(),
    ))
}

/// Recomputes `‖1_A‖/‖1_B‖` for a set witness.
pub fn set_ratio<N: NormedSpace + ?Sized>(space: &N, a: &IndexSet, b: &IndexSet) -> f64 {
    indicator_norm(space, a.as_slice()) / indicator_norm(space, b.as_slice())
}

/// Quasi-greedy constant `K`: exactly 1 for absolute norms, otherwise
/// `sup ‖G_m x‖/‖x‖` over the corpus.
pub fn quasi_greedy_constant<N: NormedSpace + ?Sized>(
    space: &N,
    corpus: &[Vector],
) -> Result<ConstantEstimate> {
    let budget = Budget {
        size_cap: None,
        corpus: Some(corpus.len()),
        seed: None,
    };
    if space.is_absolute() {
        return Ok(ConstantEstimate {
            kind: "quasi_greedy".into(),
            value: 1.0,
            exactness: Exactness::Exact,
            witness: None,
            budget,
            skipped: 0,
        });
    }
    let mut best = 1.0;
    let mut witness = None;
    let mut skipped = 0;
    for x in corpus {
        let nx = space.norm_of(x);
        if nx <= ZERO_DENOMINATOR {
            skipped += 1;
            continue;
        }
        for m in 1..=x.dim() {
            let r = space.norm_of(&tga(x, m)?) / nx;
            if r > best {
                best = r;
                witness = Some(ConstWitness::Vector {
                    x: x.coeffs().to_vec(),
                    m,
                    set: None,
                });
            }
        }
    }
    Ok(ConstantEstimate {
        kind: "quasi_greedy".into(),
        value: best,
        exactness: Exactness::LowerBound,
        witness,
        budget,
        skipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyKind {
    /// Denominator `σ̃_m^L`.
    PartiallyGreedy,
    /// Denominator `‖Σ_{i>m} x_i e_i‖`, the original tail form.
    PartiallyGreedyTail,
    /// Denominator `σ̃_m^R`.
    ReversePartiallyGreedy,
    /// Denominator `σ̃_m`.
    AlmostGreedy,
    /// Denominator `σ_m`.
    Greedy,
    /// Denominator `σ_m^L`.
    PropertyStar,
    /// Denominator `σ_m^R`.
    PropertyStarStar,
    /// Free coefficients on `A` left of `α_m` or right of `β_m`, `|A| ≤ m`.
    GagSet,
    /// `m = 1` with denominator `min(‖x‖, ‖x − x_j e_j‖)`, `j < α_1`.
    OnePg,
}

impl GreedyKind {
    pub const ALL: [GreedyKind; 9] = [
        GreedyKind::PartiallyGreedy,
        GreedyKind::PartiallyGreedyTail,
        GreedyKind::ReversePartiallyGreedy,
        GreedyKind::AlmostGreedy,
        GreedyKind::Greedy,
        GreedyKind::PropertyStar,
        GreedyKind::PropertyStarStar,
        GreedyKind::GagSet,
        GreedyKind::OnePg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GreedyKind::PartiallyGreedy => "partially_greedy",
            GreedyKind::PartiallyGreedyTail => "partially_greedy_tail",
            GreedyKind::ReversePartiallyGreedy => "reverse_partially_greedy",
            GreedyKind::AlmostGreedy => "almost_greedy",
            GreedyKind::Greedy => "greedy",
            GreedyKind::PropertyStar => "property_star",
            GreedyKind::PropertyStarStar => "property_star_star",
            GreedyKind::GagSet => "gag_set",
            GreedyKind::OnePg => "one_pg",
        }
    }
}

/// Sets `A ⊆ pool` with `|A| ≤ m` where `pool` is the union of the left and
/// right regions of `x`.
pub fn gag_value<N: NormedSpace + ?Sized>(
    space: &N,
    x: &Vector,
    m: usize,
    alpha: Option<usize>,
    beta: Option<usize>,
) -> ErrorValue {
    let d = space.dim();
    let mut pool = left_pool(d, alpha);
    pool.extend(right_pool(d, beta));
    pool.sort_unstable();
    pool.dedup();
    let sets = candidate_sets(&pool, SetSize::AtMost(m), space.is_absolute());
    minimize_over_sets(
        space,
        x.coeffs(),
        sets,
        Coefficients::Free,
        Functional::Sigma,
    )
}

/// The denominator of `kind` at `(x, m)`; `None` when infeasible.
pub fn greedy_denominator<N: NormedSpace + ?Sized>(
    space: &N,
    kind: GreedyKind,
    x: &Vector,
    m: usize,
) -> Result<Option<(f64, Option<IndexSet>)>> {
    let to = |e: ErrorValue| e.value.map(|v| (v, Some(e.witness_set)));
    Ok(match kind {
        GreedyKind::PartiallyGreedy => to(sigma_tilde_left(space, x, m)?),
        GreedyKind::PartiallyGreedyTail => {
            let tail = x.remove(&IndexSet::range(0, m));
            Some((space.norm_of(&tail), None))
        }
        GreedyKind::ReversePartiallyGreedy => to(sigma_tilde_right(space, x, m)?),
        GreedyKind::AlmostGreedy => to(sigma_tilde(space, x, m)?),
        GreedyKind::Greedy => to(sigma(space, x, m)?),
        GreedyKind::PropertyStar => to(sigma_left(space, x, m)?),
        GreedyKind::PropertyStarStar => to(sigma_right(space, x, m)?),
        GreedyKind::GagSet => {
            let sel = greedy_ordering(x).at(m)?;
            to(gag_value(space, x, m, sel.alpha(), sel.beta()))
        }
        GreedyKind::OnePg => {
            if m != 1 {
                return Ok(None);
            }
            let alpha = greedy_ordering(x).at(1)?.alpha().unwrap_or(0);
            let mut best = (space.norm_of(x), None);
            for j in 0..alpha {
                let (v, _) = best_on_set(space, x.coeffs(), &[j], Coefficients::Projection);
                if v < best.0 {
                    best = (v, Some(IndexSet::new(vec![j])));
                }
            }
            Some(best)
        }
    })
}

/// `sup ‖x − G_m x‖ / denominator` over the corpus and `1 ≤ m ≤ d`.
/// Infeasible and zero denominators are skipped and counted.
pub fn greedy_type_constant<N: NormedSpace + ?Sized>(
    space: &N,
    kind: GreedyKind,
    corpus: &[Vector],
) -> Result<ConstantEstimate> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(x) = corpus.iter().find(|x| x.dim() != space.dim()) {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: x.dim(),
        });
    }
    let per_vector: Vec<Result<(f64, Option<ConstWitness>, usize)>> = corpus
        .par_iter()
        .map(|x| {
            let mut best = (0.0, None, 0usize);
            for m in 1..=x.dim() {
                let num = space.norm_of(&x.sub(&tga(x, m)?));
                match greedy_denominator(space, kind, x, m)? {
                    Some((den, set)) if den > ZERO_DENOMINATOR => {
                        let r = num / den;
                        if r > best.0 {
                            best.0 = r;
                            best.1 = Some(ConstWitness::Vector {
                                x: x.coeffs().to_vec(),
                                m,
                                set,
                            });
                        }
                    }
                    _ => best.2 += 1,
                }
            }
            Ok(best)
        })
        .collect();
    let mut value = 0.0;
    let mut witness = None;
    let mut skipped = 0;
    for r in per_vector {
        let (v, w, s) = r?;
        skipped += s;
        if v > value {
            value = v;
            witness = w;
        }
    }
    Ok(ConstantEstimate {
        kind: kind.name().into(),
        value,
        exactness: Exactness::LowerBound,
        witness,
        budget: Budget {
            size_cap: None,
            corpus: Some(corpus.len()),
            seed: None,
        },
        skipped,
    })
}
