//! Greedy orderings and the thresholding (TGA), weak thresholding (WTGA)
//! and branch (BGA) greedy algorithms.

use std::cmp::Ordering;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::vector::{IndexSet, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Equal magnitudes are ordered by increasing index.
    SmallestIndex,
}

/// A greedy ordering `ρ` of all indices together with a cut `m`, so that
/// `Λ_m(x) = {ρ(1), ..., ρ(m)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedySelection {
    pub order: Vec<usize>,
    /// `e_{ρ(i)}^*(x)` in ordering position.
    pub values: Vec<f64>,
    pub m: usize,
    pub tie_policy: TiePolicy,
}

impl GreedySelection {
    pub fn at(&self, m: usize) -> Result<Self> {
        check_range("m", m, 0, self.order.len())?;
        Ok(Self { m, ..self.clone() })
    }

    /// `Λ_m(x)`.
    pub fn lambda(&self) -> IndexSet {
        IndexSet::new(self.order[..self.m].to_vec())
    }

    /// `α_m(x) = min Λ_m(x)`; `None` for `m = 0`.
    pub fn alpha(&self) -> Option<usize> {
        self.order[..self.m].iter().copied().min()
    }

    /// `β_m(x) = max Λ_m(x)`; `None` for `m = 0`.
    pub fn beta(&self) -> Option<usize> {
        self.order[..self.m].iter().copied().max()
    }
}

fn magnitude_order(x: &[f64], i: usize, j: usize) -> Ordering {
    x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j))
}

/// Orders all `d` indices by non-increasing `|x_i|`, ties by smallest index.
/// The returned selection has `m = d`.
pub fn greedy_ordering(x: &Vector) -> GreedySelection {
    let c = x.coeffs();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&i, &j| magnitude_order(c, i, j));
    let values = order.iter().map(|&i| c[i]).collect();
    GreedySelection {
        order,
        values,
        m: c.len(),
        tie_policy: TiePolicy::SmallestIndex,
    }
}

/// `G_m(x)` with the canonical greedy ordering.
pub fn tga(x: &Vector, m: usize) -> Result<Vector> {
    check_range("m", m, 0, x.dim())?;
    let sel = greedy_ordering(x).at(m)?;
    Ok(x.project(&sel.lambda()))
}

/// All valid greedy sets `Λ_m(x)` when ties make the choice non-unique.
#[derive(Clone, Debug)]
pub struct TieExpansion {
    pub sets: Vec<IndexSet>,
    /// False when the number of valid sets exceeded the limit and only the
    /// canonical set was kept.
    pub exhaustive: bool,
}

/// Enumerates every `m`-set `Λ` with `min_Λ |x_i| ≥ max_{Λ^c} |x_i|`, if
/// there are at most `limit` of them; otherwise returns the canonical one.
pub fn greedy_sets(x: &Vector, m: usize, limit: usize) -> Result<TieExpansion> {
    check_range("m", m, 0, x.dim())?;
    let canonical = greedy_ordering(x).at(m)?.lambda();
    if m == 0 {
        return Ok(TieExpansion {
            sets: vec![canonical],
            exhaustive: true,
        });
    }
    let c = x.coeffs();
    let v = c[greedy_ordering(x).order[m - 1]].abs();
    let strict: Vec<usize> = (0..c.len()).filter(|&i| c[i].abs() > v).collect();
    let tied: Vec<usize> = (0..c.len()).filter(|&i| c[i].abs() == v).collect();
    let need = m - strict.len();
    let count = binomial(tied.len(), need);
    if count <= 1 {
        return Ok(TieExpansion {
            sets: vec![canonical],
            exhaustive: true,
        });
    }
    if count > limit as u128 {
        return Ok(TieExpansion {
            sets: vec![canonical],
            exhaustive: false,
        });
    }
    let sets = tied
        .into_iter()
        .combinations(need)
        .map(|combo| {
            let mut s = strict.clone();
            s.extend(combo);
            IndexSet::new(s)
        })
        .collect();
    Ok(TieExpansion {
        sets,
        exhaustive: true,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// `𝒜^τ(x) = {n : |x_n| ≥ τ max_k |x_k|}`.
pub fn weak_set(x: &Vector, tau: f64) -> Result<IndexSet> {
    check_tau(tau)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(weak_set_unchecked(x.coeffs(), tau))
}

fn weak_set_unchecked(c: &[f64], tau: f64) -> IndexSet {
    let threshold = tau * c.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    IndexSet::new((0..c.len()).filter(|&i| c[i].abs() >= threshold).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakPolicy {
    /// Take the largest remaining coefficient: reproduces the TGA.
    Greedy,
    /// Take the smallest coefficient still within `τ` of the largest
    /// unselected one.
    Lazy,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakSelection {
    /// `Λ_m^τ(x)`.
    pub indices: IndexSet,
    /// Indices in the order they were taken.
    pub steps: Vec<usize>,
    /// `τ · max_{unselected} |x_i|` before each step.
    pub thresholds: Vec<f64>,
    pub tau: f64,
    pub policy: WeakPolicy,
}

impl WeakSelection {
    pub fn alpha(&self) -> Option<usize> {
        self.indices.first()
    }

    pub fn beta(&self) -> Option<usize> {
        self.indices.last()
    }
}

/// Weak thresholding greedy step: returns `Λ_m^τ(x)` and `G_m^τ(x)`.
pub fn wtga(x: &Vector, m: usize, tau: f64, policy: WeakPolicy) -> Result<(WeakSelection, Vector)> {
    check_tau(tau)?;
    check_range("m", m, 0, x.dim())?;
    let c = x.coeffs();
    let mut remaining: Vec<usize> = (0..c.len()).collect();
    let mut steps = Vec::with_capacity(m);
    let mut thresholds = Vec::with_capacity(m);
    for _ in 0..m {
        let top = remaining
            .iter()
            .fold(0.0, |acc: f64, &i| acc.max(c[i].abs()));
        let threshold = tau * top;
        let pick = match policy {
            WeakPolicy::Greedy => remaining
                .iter()
                .copied()
                .min_by(|&i, &j| magnitude_order(c, i, j)),
            WeakPolicy::Lazy => remaining
                .iter()
                .copied()
                .filter(|&i| c[i].abs() >= threshold)
                .min_by(|&i, &j| c[i].abs().total_cmp(&c[j].abs()).then(i.cmp(&j))),
        }
        .expect("m ≤ d leaves an admissible index");
        remaining.retain(|&i| i != pick);
        steps.push(pick);
        thresholds.push(threshold);
    }
    let indices = IndexSet::new(steps.clone());
    debug_assert!({
        let lo = indices
            .iter()
            .fold(f64::INFINITY, |a, &i| a.min(c[i].abs()));
        let hi = remaining.iter().fold(0.0, |a: f64, &i| a.max(c[i].abs()));
        m == 0 || lo >= tau * hi
    });
    let approx = x.project(&indices);
    Ok((
        WeakSelection {
            indices,
            steps,
            thresholds,
            tau,
            policy,
        },
        approx,
    ))
}

/// A branch selector `𝒢^τ`: picks one index of `𝒜^τ(x)` for nonzero `x`.
///
/// Implementations must satisfy: the choice lies in `𝒜^τ(x)`, is invariant
/// under `x ↦ λx` (`λ ≠ 0`), and depends only on `𝒜^τ(x)` and the
/// coefficients on it. [`probe_selector_axioms`] checks these on samples.
pub trait BranchSelector: Sync {
    fn tau(&self) -> f64;
    fn select(&self, x: &[f64]) -> usize;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    SmallestIndex,
    LargestCoefficient,
    LargestIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSelectorSpec {
    pub tau: f64,
    pub rule: BranchRule,
}

impl BranchSelectorSpec {
    pub fn new(tau: f64, rule: BranchRule) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self { tau, rule })
    }
}

impl BranchSelector for BranchSelectorSpec {
    fn tau(&self) -> f64 {
        self.tau
    }

    fn select(&self, x: &[f64]) -> usize {
        let admissible = weak_set_unchecked(x, self.tau);
        match self.rule {
            BranchRule::SmallestIndex => admissible.first(),
            BranchRule::LargestIndex => admissible.last(),
            BranchRule::LargestCoefficient => admissible
                .iter()
                .copied()
                .min_by(|&i, &j| magnitude_order(x, i, j)),
        }
        .expect("nonzero vector has a nonempty weak set")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchStep {
    pub index: usize,
    pub coefficient: f64,
    /// `τ · max |residual|` at selection time.
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchRun {
    pub steps: Vec<BranchStep>,
    /// `B_m^τ(x)`.
    pub indices: IndexSet,
    /// `𝒢_m^τ(x)`.
    pub approx: Vector,
}

impl BranchRun {
    pub fn alpha(&self) -> Option<usize> {
        self.indices.first()
    }

    pub fn beta(&self) -> Option<usize> {
        self.indices.last()
    }
}

/// Runs the branch greedy algorithm for `m` steps on the residuals of `x`.
pub fn bga<S: BranchSelector + ?Sized>(x: &Vector, m: usize, selector: &S) -> Result<BranchRun> {
    check_tau(selector.tau())?;
    check_range("m", m, 0, x.support().len())?;
    let mut residual = x.coeffs().to_vec();
    let mut steps = Vec::with_capacity(m);
    for _ in 0..m {
        let top = residual.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        let index = selector.select(&residual);
        let threshold = selector.tau() * top;
        debug_assert!(residual[index].abs() >= threshold && residual[index] != 0.0);
        steps.push(BranchStep {
            index,
            coefficient: residual[index],
            threshold,
        });
        residual[index] = 0.0;
    }
    let indices = IndexSet::new(steps.iter().map(|s| s.index).collect());
    let approx = x.project(&indices);
    Ok(BranchRun {
        steps,
        indices,
        approx,
    })
}

/// Checks the three selector axioms on seeded random vectors.
pub fn probe_selector_axioms<S: BranchSelector + ?Sized>(
    selector: &S,
    dim: usize,
    samples: usize,
    seed: u64,
) -> std::result::Result<(), String> {
    let tau = selector.tau();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
            .collect();
        if x.iter().all(|&v| v == 0.0) {
            continue;
        }
        let admissible = weak_set_unchecked(&x, tau);
        let pick = selector.select(&x);
        if !admissible.contains(pick) {
            return Err(format!(
                "selected index {} outside the weak set {admissible}",
                pick + 1
            ));
        }
        for lambda in [-7.0, 0.5, 3.0] {
            let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
            if selector.select(&scaled) != pick {
                return Err(format!("choice changes under scaling by {lambda}"));
            }
        }
        let top = x.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        let y: Vec<f64> = (0..dim)
            .map(|i| {
                if admissible.contains(i) {
                    x[i]
                } else {
                    rng.gen_range(-1.0..1.0) * tau * top * 0.999
                }
            })
            .collect();
        if weak_set_unchecked(&y, tau) == admissible && selector.select(&y) != pick {
            return Err("choice depends on coefficients outside the weak set".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(greedy_ordering(&v(&[3.0, 1.0, 2.0])).order, vec![0, 2, 1]);
        assert_eq!(greedy_ordering(&v(&[1.0, -1.0])).order, vec![0, 1]);
        assert_eq!(
            greedy_ordering(&v(&[0.0, 5.0, 0.0, 5.0])).order[..2],
            [1, 3]
        );
    }

    #[test]
    fn tga_examples() {
        assert_eq!(tga(&v(&[3.0, 1.0, 2.0]), 1).unwrap(), v(&[3.0, 0.0, 0.0]));
        assert_eq!(
            tga(&v(&[4.0, 3.0, 2.0, 1.0]), 2).unwrap(),
            v(&[4.0, 3.0, 0.0, 0.0])
        );
        assert!(tga(&v(&[4.0, 3.0]), 0).unwrap().is_zero());
        assert_eq!(tga(&v(&[4.0, 3.0]), 2).unwrap(), v(&[4.0, 3.0]));
        assert!(matches!(tga(&v(&[1.0]), 2), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn alpha_beta() {
        let sel = greedy_ordering(&v(&[0.0, 0.0, 5.0, 1.0])).at(1).unwrap();
        assert_eq!(sel.alpha(), Some(2));
        assert_eq!(sel.beta(), Some(2));
        let sel = sel.at(0).unwrap();
        assert_eq!(sel.alpha(), None);
    }

    #[test]
    fn tie_expansion() {
        let x = v(&[1.0, 1.0, 1.0, 0.5]);
        let t = greedy_sets(&x, 2, 24).unwrap();
        assert!(t.exhaustive);
        assert_eq!(t.sets.len(), 3);
        let t = greedy_sets(&x, 2, 2).unwrap();
        assert!(!t.exhaustive);
        assert_eq!(t.sets, vec![IndexSet::new(vec![0, 1])]);
        let t = greedy_sets(&v(&[3.0, 2.0, 1.0]), 2, 24).unwrap();
        assert_eq!(t.sets.len(), 1);
    }

    #[test]
    fn weak_set_examples() {
        assert_eq!(
            weak_set(&v(&[1.0, 0.5, 0.4]), 0.5).unwrap(),
            IndexSet::new(vec![0, 1])
        );
        assert_eq!(
            weak_set(&v(&[1.0, 1.0]), 0.9).unwrap(),
            IndexSet::new(vec![0, 1])
        );
        assert_eq!(
            weak_set(&v(&[2.0, 0.1]), 0.5).unwrap(),
            IndexSet::new(vec![0])
        );
        assert!(matches!(
            weak_set(&v(&[0.0, 0.0]), 0.5),
            Err(Error::ZeroVector)
        ));
        assert!(weak_set(&v(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn wtga_examples() {
        let (sel, _) = wtga(&v(&[1.0, 0.6, 0.1]), 1, 0.5, WeakPolicy::Lazy).unwrap();
        assert_eq!(sel.indices, IndexSet::new(vec![1]));
        for policy in [WeakPolicy::Greedy, WeakPolicy::Lazy] {
            let (sel, _) = wtga(&v(&[1.0, 0.4]), 1, 0.5, policy).unwrap();
            assert_eq!(sel.indices, IndexSet::new(vec![0]));
        }
        let x = v(&[0.3, -2.0, 1.5, 0.0, 1.9]);
        for m in 0..=5 {
            let (_, g) = wtga(&x, m, 0.5, WeakPolicy::Greedy).unwrap();
            assert_eq!(g, tga(&x, m).unwrap());
        }
    }

    #[test]
    fn bga_examples() {
        let sel = BranchSelectorSpec::new(0.75, BranchRule::SmallestIndex).unwrap();
        let run = bga(&v(&[1.0, 0.8, 0.9]), 2, &sel).unwrap();
        assert_eq!(run.indices, IndexSet::new(vec![0, 1]));
        assert_eq!(run.steps[1].index, 1);

        let x = v(&[0.2, -1.0, 0.95, 0.0, 0.5]);
        let scaled = x.scale(-7.0);
        for rule in [
            BranchRule::SmallestIndex,
            BranchRule::LargestCoefficient,
            BranchRule::LargestIndex,
        ] {
            let sel = BranchSelectorSpec::new(0.5, rule).unwrap();
            for m in 0..=4 {
                assert_eq!(
                    bga(&x, m, &sel).unwrap().indices,
                    bga(&scaled, m, &sel).unwrap().indices
                );
            }
        }
        let largest = BranchSelectorSpec::new(0.5, BranchRule::LargestCoefficient).unwrap();
        for m in 0..=4 {
            assert_eq!(bga(&x, m, &largest).unwrap().approx, tga(&x, m).unwrap());
        }
        assert!(matches!(
            bga(&x, 5, &largest),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn builtin_selectors_pass_axiom_probe() {
        for rule in [
            BranchRule::SmallestIndex,
            BranchRule::LargestCoefficient,
            BranchRule::LargestIndex,
        ] {
            let sel = BranchSelectorSpec::new(0.6, rule).unwrap();
            probe_selector_axioms(&sel, 7, 300, 11).unwrap();
        }
    }

    #[test]
    fn probe_rejects_bad_selector() {
        struct Biggest;
        impl BranchSelector for Biggest {
            fn tau(&self) -> f64 {
                0.5
            }
            // Picks the smallest nonzero coefficient: violates axiom (a).
            fn select(&self, x: &[f64]) -> usize {
                (0..x.len())
                    .filter(|&i| x[i] != 0.0)
                    .min_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()))
                    .unwrap()
            }
        }
        assert!(probe_selector_axioms(&Biggest, 6, 100, 3).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(24, 12), 2_704_156);
    }
}
