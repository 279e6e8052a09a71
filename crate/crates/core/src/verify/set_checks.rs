//! Checks on indicator sums: sign unconditionality and the democracy bound
//! from the conservative constants.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde_json::json;

use super::{CheckReport, Context, Tally, Violation};
use crate::error::Result;
use crate::space::NormedSpace;
use crate::vector::IndexSet;

const SIGN_CAP: usize = 6;
const GRID_CAP: usize = 4;
const GRID: [f64; 4] = [-1.0, -0.25, 0.25, 1.0];

fn sum_on(dim: usize, set: &[usize], coeffs: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for (&i, &a) in set.iter().zip(coeffs) {
        v[i] = a;
    }
    v
}

/// `(1/2K)‖1_A‖ ≤ ‖Σ ε_j e_j‖ ≤ 2K‖1_A‖` for every sign pattern, and
/// `‖Σ a_j e_j‖ ≤ 2K max|a_j| ‖1_A‖` on a coefficient grid.
pub fn check_sign_unconditionality(ctx: &Context) -> Result<CheckReport> {
    let k = ctx.constants.quasi_greedy;
    let d = ctx.space.dim();
    let mut t = Tally::new(Some(2.0 * k));
    let sign_cap = ctx.size_cap.min(SIGN_CAP);
    let grid_cap = ctx.size_cap.min(GRID_CAP);
    for size in 1..=sign_cap {
        for set in (0..d).combinations(size) {
            let ind = ctx.space.eval(&sum_on(d, &set, &vec![1.0; size]));
            for signs in (0..size).map(|_| [1.0, -1.0]).multi_cartesian_product() {
                let v = ctx.space.eval(&sum_on(d, &set, &signs));
                let witness = || {
                    Violation::new(v, ind, format!("signs {signs:?}"))
                        .with_sets(vec![IndexSet::new(set.clone())])
                };
                t.record(v, Some(ind), witness);
                t.record(ind, Some(v), witness);
            }
            if size <= grid_cap {
                for coeffs in (0..size).map(|_| GRID).multi_cartesian_product() {
                    let v = ctx.space.eval(&sum_on(d, &set, &coeffs));
                    let top = coeffs.iter().fold(0.0, |m: f64, a| m.max(a.abs()));
                    t.record(v, Some(top * ind), || {
                        Violation::new(v, top * ind, format!("coefficients {coeffs:?}"))
                            .with_sets(vec![IndexSet::new(set.clone())])
                    });
                }
            }
        }
    }
    let mut notes = ctx.base_notes();
    notes.insert("sign_size_cap".into(), json!(sign_cap));
    notes.insert("grid_size_cap".into(), json!(grid_cap));
    Ok(t.finish("sign_unconditionality", &ctx.label, notes))
}

/// `Γ ≤ Γ'(2K_b + 1) + 2K_b` with `Γ' = max(Γ_c, Γ_r)`, plus the trivial
/// `Γ ≥ Γ'`.
pub fn check_crd(ctx: &Context) -> Result<CheckReport> {
    let c = &ctx.constants;
    let gamma = c.democratic.value;
    let sided = c.conservative.value.max(c.reverse_conservative.value);
    let bound = sided * (2.0 * c.basis + 1.0) + 2.0 * c.basis;
    let mut t = Tally::new(Some(bound));
    t.assert_le(gamma, bound, || {
        Violation::new(gamma, bound, "democratic exceeds the split bound")
    });
    t.assert_le(sided, gamma, || {
        Violation::new(sided, gamma, "sided constant exceeds democratic")
    });
    t.max_ratio = gamma / bound;
    let mut notes: BTreeMap<String, serde_json::Value> = ctx.base_notes();
    notes.insert("gamma".into(), json!(gamma));
    notes.insert("size_cap".into(), json!(ctx.size_cap));
    Ok(t.finish("crd", &ctx.label, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;
    use crate::verify::VerifyConfig;

    fn ctx(space: &SpaceSpec) -> Context<'_> {
        let cfg = VerifyConfig {
            corpus_size: 10,
            ..VerifyConfig::default()
        };
        Context::new(space, cfg).unwrap()
    }

    #[test]
    fn sign_unconditionality_on_absolute_spaces() {
        for s in [
            SpaceSpec::lp(5, 2.0).unwrap(),
            SpaceSpec::example(2).unwrap(),
        ] {
            let r = check_sign_unconditionality(&ctx(&s)).unwrap();
            assert!(r.pass);
            assert_eq!(r.max_ratio, Some(1.0));
        }
    }

    #[test]
    fn crd_on_example() {
        let s = SpaceSpec::example(3).unwrap();
        let r = check_crd(&ctx(&s)).unwrap();
        assert!(r.pass);
        assert_eq!(r.bound, Some(11.0));
        assert_eq!(r.notes["gamma"], json!(3.0));
    }
}
