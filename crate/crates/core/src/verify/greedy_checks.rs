//! Checks comparing the greedy residual `‖x − G_m x‖` with the error
//! functionals, plus the coefficient inequalities behind them.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde_json::{json, Value};

use super::{tally_corpus, CheckReport, Context, Tally, Violation};
use crate::constants::{gag_value, ConstWitness, ConstantEstimate, ZERO_DENOMINATOR};
use crate::error::Result;
use crate::functionals::{
    dist_indicator_with, minimize_over_sets, overlap_sets, sigma_left_with, sigma_right_with,
    sigma_tilde_left_with, Coefficients, ErrorValue, Functional, Side,
};
use crate::space::NormedSpace;
use crate::vector::{IndexSet, Vector};

/// Perturbation used for the two-level witnesses `1_A + (1+ε)1_B`.
pub const WITNESS_EPS: f64 = 1e-3;

/// Largest `m` swept by the checks that enumerate many sets per instance.
fn heavy_m_cap(d: usize, small: usize) -> usize {
    if d > 8 {
        small.min(d)
    } else {
        d
    }
}

fn residual(ctx: &Context, x: &Vector, lambda: &IndexSet) -> f64 {
    ctx.norm(&x.remove(lambda))
}

/// `|x_{ρ(m)}| · ‖Σ_{i≤m} e_{ρ(i)}‖ ≤ 4K²‖x‖` for every greedy ordering.
pub fn check_min_inequality(ctx: &Context) -> Result<CheckReport> {
    let k = ctx.constants.quasi_greedy;
    let d = ctx.space.dim();
    let t = tally_corpus(&ctx.corpus, Some(4.0 * k * k), |x, t| {
        let nx = ctx.norm(x);
        for m in 1..=d {
            for lambda in ctx.greedy_variants(x, m) {
                let smallest = lambda
                    .iter()
                    .map(|&i| x.get(i).abs())
                    .fold(f64::INFINITY, f64::min);
                let lhs = smallest * ctx.norm(&Vector::indicator(d, &lambda));
                t.record(lhs, Some(nx), || {
                    Violation::new(lhs, nx, "")
                        .at(x, m)
                        .with_sets(vec![lambda.clone()])
                });
            }
        }
    });
    Ok(t.finish("min_inequality", &ctx.label, ctx.base_notes()))
}

/// `φ(|A|) · min|a_i| ≤ 4K²Γ ‖Σ a_i e_i‖` on a coefficient grid.
pub fn check_agmin(ctx: &Context) -> Result<CheckReport> {
    const GRID: [f64; 3] = [-1.0, 0.5, 2.0];
    let k = ctx.constants.quasi_greedy;
    let gamma = ctx.constants.democratic.value;
    let d = ctx.space.dim();
    let cap = ctx.size_cap.min(4);
    let mut phi = vec![0.0_f64; ctx.size_cap + 1];
    for s in 1..=ctx.size_cap {
        let top = ctx.table.entries[s].iter().map(|e| e.1).fold(0.0, f64::max);
        phi[s] = phi[s - 1].max(top);
    }
    let mut t = Tally::new(Some(4.0 * k * k * gamma));
    for (size, &fundamental) in phi.iter().enumerate().take(cap + 1).skip(1) {
        for set in (0..d).combinations(size) {
            for coeffs in (0..size).map(|_| GRID).multi_cartesian_product() {
                let mut v = vec![0.0; d];
                for (&i, &a) in set.iter().zip(&coeffs) {
                    v[i] = a;
                }
                let smallest = coeffs.iter().map(|a| a.abs()).fold(f64::INFINITY, f64::min);
                let lhs = fundamental * smallest;
                let rhs = ctx.space.eval(&v);
                t.record(lhs, Some(rhs), || {
                    Violation::new(lhs, rhs, format!("coefficients {coeffs:?}"))
                        .with_sets(vec![IndexSet::new(set.clone())])
                });
            }
        }
    }
    let mut notes = ctx.base_notes();
    notes.insert("gamma".into(), json!(gamma));
    notes.insert("set_size_cap".into(), json!(cap));
    Ok(t.finish("agmin", &ctx.label, notes))
}

/// Witness vector `1_A + (1+ε)1_B` for a set-ratio constant.
fn two_level_witness(dim: usize, est: &ConstantEstimate) -> Option<(Vector, usize)> {
    let Some(ConstWitness::Sets { a, b }) = &est.witness else {
        return None;
    };
    let x = Vector::indicator(dim, a).add(&Vector::scaled_indicator(dim, b, 1.0 + WITNESS_EPS));
    Some((x, b.len()))
}

/// Sweeps corpus × m × greedy variants, comparing `‖x − P_Λ x‖` with the
/// functional evaluated at the variant's `α`/`β`.
fn residual_vs<F>(
    ctx: &Context,
    corpus: &[Vector],
    m_cap: usize,
    bound: Option<f64>,
    denominator: F,
) -> Tally
where
    F: Fn(&Vector, usize, &IndexSet) -> ErrorValue + Sync,
{
    tally_corpus(corpus, bound, |x, t| {
        for m in 1..=m_cap {
            for lambda in ctx.greedy_variants(x, m) {
                let lhs = residual(ctx, x, &lambda);
                let e = denominator(x, m, &lambda);
                t.record(lhs, e.value, || {
                    Violation::new(lhs, e.value_or_inf(), e.functional.name())
                        .at(x, m)
                        .with_sets(vec![lambda.clone(), e.witness_set.clone()])
                });
            }
        }
    })
}

/// `‖x − G_m x‖ ≤ (1 + K + 8K⁴Γ_c) σ̃_m^L(x)`, and the converse witness
/// showing the (qc) constant is at least `Γ_c/(1+ε)`.
pub fn check_pg_bound(ctx: &Context) -> Result<CheckReport> {
    let c = &ctx.constants;
    let k = c.quasi_greedy;
    let bound = 1.0 + k + 8.0 * k.powi(4) * c.conservative.value;
    let d = ctx.space.dim();
    let mut t = residual_vs(ctx, &ctx.corpus, d, Some(bound), |x, m, l| {
        sigma_tilde_left_with(ctx.space, x, m, l.first())
    });
    let mut notes = ctx.base_notes();
    if let Some((x, m)) = two_level_witness(d, &c.conservative) {
        let lambda = ctx.greedy_variants(&x, m).remove(0);
        let num = residual(ctx, &x, &lambda);
        let den = sigma_tilde_left_with(ctx.space, &x, m, lambda.first()).value_or_inf();
        let ratio = num / den;
        let floor = c.conservative.value / (1.0 + WITNESS_EPS);
        t.assert_le(floor, ratio, || {
            Violation::new(floor, ratio, "converse witness below Γ_c/(1+ε)").at(&x, m)
        });
        notes.insert("converse_ratio".into(), json!(ratio));
    }
    Ok(t.finish("pg_bound", &ctx.label, notes))
}

fn star_bound(ctx: &Context, gamma: f64) -> f64 {
    let k = ctx.constants.quasi_greedy;
    let kb = ctx.constants.basis;
    k * kb + 16.0 * k.powi(4) * gamma * (kb + 1.0) + k * (kb + 1.0) + 1.0
}

/// `‖x − G_m x‖ ≤ (K K_b + 16K⁴Γ_c(K_b+1) + K(K_b+1) + 1) σ_m^L(x)`.
pub fn check_property_star(ctx: &Context) -> Result<CheckReport> {
    let bound = star_bound(ctx, ctx.constants.conservative.value);
    let d = ctx.space.dim();
    let t = residual_vs(ctx, &ctx.corpus, d, Some(bound), |x, m, l| {
        sigma_left_with(ctx.space, x, m, l.first())
    });
    Ok(t.finish("property_star", &ctx.label, ctx.base_notes()))
}

/// Mirror of [`check_property_star`] with `Γ_r` and `σ_m^R`.
pub fn check_property_star_star(ctx: &Context) -> Result<CheckReport> {
    let bound = star_bound(ctx, ctx.constants.reverse_conservative.value);
    let d = ctx.space.dim();
    let t = residual_vs(ctx, &ctx.corpus, d, Some(bound), |x, m, l| {
        sigma_right_with(ctx.space, x, m, l.last())
    });
    Ok(t.finish("property_star_star", &ctx.label, ctx.base_notes()))
}

/// Supremum of `‖x − G_m x‖ / ‖x − Σ_A a_i e_i‖` over `A` left of `α_m`
/// or right of `β_m` (mixed allowed), `|A| ≤ m`.
pub fn check_gag(ctx: &Context) -> Result<CheckReport> {
    let d = ctx.space.dim();
    let t = residual_vs(ctx, &ctx.corpus, d, None, |x, m, l| {
        gag_value(ctx.space, x, m, l.first(), l.last())
    });
    Ok(t.finish("gag", &ctx.label, ctx.base_notes()))
}

pub const OVERLAP_FRACTIONS: [f64; 3] = [0.0, 0.25, 0.5];

/// Competing sets may overlap `Λ_m(x)` in at most `⌊λm⌋` indices.
pub fn check_gag_lambda(ctx: &Context) -> Result<CheckReport> {
    let d = ctx.space.dim();
    let m_cap = heavy_m_cap(d, 4);
    let mut total = Tally::new(None);
    let mut sups = BTreeMap::new();
    for lambda_frac in OVERLAP_FRACTIONS {
        let t = residual_vs(ctx, ctx.heavy_corpus(), m_cap, None, |x, m, l| {
            let budget = (lambda_frac * m as f64).floor() as usize;
            let sets = overlap_sets(d, l, budget, m, ctx.space.is_absolute());
            minimize_over_sets(
                ctx.space,
                x.coeffs(),
                sets,
                Coefficients::Free,
                Functional::Sigma,
            )
        });
        sups.insert(format!("{lambda_frac}"), json!(t.max_ratio));
        total = total.merge(t);
    }
    let mut notes = ctx.base_notes();
    notes.insert(
        "sup_by_lambda".into(),
        Value::Object(sups.into_iter().collect()),
    );
    notes.insert("m_cap".into(), json!(m_cap));
    Ok(total.finish("gag_lambda", &ctx.label, notes))
}

/// Supremum of `‖x − G_m x‖ / d(x, a1_A)` with `A` left of `α_m(x)`, right
/// of `β_m(x)`, or either. The two-level witnesses for `Γ_c` and `Γ_r` must
/// push the left and right suprema to at least `Γ/(1+ε)`.
pub fn check_indicator_characterization(ctx: &Context) -> Result<CheckReport> {
    let d = ctx.space.dim();
    let m_cap = heavy_m_cap(d, 3);
    let mut total = Tally::new(None);
    let mut sups = BTreeMap::new();
    for (name, side) in [
        ("left", Side::Left),
        ("right", Side::Right),
        ("both", Side::Both),
    ] {
        let t = tally_corpus(ctx.heavy_corpus(), None, |x, t| {
            let nx = ctx.norm(x);
            for m in 1..=m_cap {
                for lambda in ctx.greedy_variants(x, m) {
                    let lhs = residual(ctx, x, &lambda);
                    let e =
                        dist_indicator_with(ctx.space, x, m, side, lambda.first(), lambda.last());
                    let den = e.value.filter(|&v| v > 1e-9 * nx.max(ZERO_DENOMINATOR));
                    t.record(lhs, den, || {
                        Violation::new(lhs, e.value_or_inf(), name).at(x, m)
                    });
                }
            }
        });
        sups.insert(name.to_string(), json!(t.max_ratio));
        total = total.merge(t);
    }
    let mut converse = BTreeMap::new();
    let c = &ctx.constants;
    for (name, side, est) in [
        ("left", Side::Left, &c.conservative),
        ("right", Side::Right, &c.reverse_conservative),
    ] {
        if let Some((x, m)) = two_level_witness(d, est) {
            let lambda = ctx.greedy_variants(&x, m).remove(0);
            let num = residual(ctx, &x, &lambda);
            for s in [side, Side::Both] {
                let den = dist_indicator_with(ctx.space, &x, m, s, lambda.first(), lambda.last())
                    .value_or_inf();
                let ratio = num / den;
                let floor = est.value / (1.0 + WITNESS_EPS);
                total.assert_le(floor, ratio, || {
                    Violation::new(floor, ratio, format!("{name} witness below Γ/(1+ε)")).at(&x, m)
                });
                converse.insert(format!("{name}/{s:?}").to_lowercase(), json!(ratio));
            }
        }
    }
    let mut notes = ctx.base_notes();
    notes.insert(
        "sup_by_side".into(),
        Value::Object(sups.into_iter().collect()),
    );
    notes.insert(
        "converse_witness_ratios".into(),
        Value::Object(converse.into_iter().collect()),
    );
    notes.insert("m_cap".into(), json!(m_cap));
    Ok(total.finish("indicator", &ctx.label, notes))
}

/// `σ_m^L(x) ≥ ‖x‖/(1+K_b)` and `σ_m^R(x) ≥ ‖x‖/K_b` at `m = |supp x|`,
/// where `Λ_m(x) = supp x`. Recorded as `‖x‖ ≤ 1 · (1+K_b)σ_m^L(x)` etc.
pub fn check_remark_liminf(ctx: &Context) -> Result<CheckReport> {
    let kb = ctx.constants.basis;
    let t = tally_corpus(&ctx.corpus, Some(1.0), |x, t| {
        let supp = x.support();
        let m = supp.len();
        let nx = ctx.norm(x);
        let left = sigma_left_with(ctx.space, x, m, supp.first());
        t.record(nx, left.value.map(|v| (1.0 + kb) * v), || {
            Violation::new(nx, left.value_or_inf(), "left").at(x, m)
        });
        let right = sigma_right_with(ctx.space, x, m, supp.last());
        t.record(nx, right.value.map(|v| kb * v), || {
            Violation::new(nx, right.value_or_inf(), "right").at(x, m)
        });
    });
    let mut notes = ctx.base_notes();
    notes.insert("asserted_at".into(), json!("m = |supp x|"));
    Ok(t.finish("remark_liminf", &ctx.label, notes))
}
