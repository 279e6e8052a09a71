//! Checks for the weak (WTGA) and branch (BGA) greedy algorithms.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde_json::{json, Value};

use super::{tally_corpus, CheckReport, Context, Tally, Violation};
use crate::constants::ConstWitness;
use crate::error::Result;
use crate::functionals::{
    best_on_set, candidate_sets, left_pool, minimize_over_sets, overlap_sets, right_pool,
    Coefficients, Functional, SetSize,
};
use crate::greedy::{bga, tga, wtga, BranchRule, BranchSelectorSpec, WeakPolicy};
use crate::space::NormedSpace;
use crate::vector::{IndexSet, Vector};

const REPRODUCE_TOL: f64 = 1e-9;

fn magnitudes(tau: f64) -> [f64; 3] {
    [1.0, 1.0 / tau, 1.0 / (tau * tau)]
}

fn combo_vector(dim: usize, set: &[usize], coeffs: &[f64]) -> Vector {
    let mut v = vec![0.0; dim];
    for (&i, &a) in set.iter().zip(coeffs) {
        v[i] = a;
    }
    Vector::new(v).expect("finite")
}

fn max_sign_norm(ctx: &Context, set: &[usize]) -> f64 {
    (0..set.len())
        .map(|_| [1.0, -1.0])
        .multi_cartesian_product()
        .map(|signs| ctx.norm(&combo_vector(ctx.space.dim(), set, &signs)))
        .fold(0.0, f64::max)
}

/// Empirical constant of `max_± ‖Σ_A ±e_i‖ ≤ C ‖Σ_A a_i e_i‖` for
/// `1 ≤ |a_i| ≤ 1/τ²` on a magnitude grid.
pub fn check_property_p_tau(ctx: &Context) -> Result<CheckReport> {
    let d = ctx.space.dim();
    let tau = ctx.config.tau;
    let cap = ctx.size_cap.min(4);
    let mut t = Tally::new(None);
    let mut half_sup: f64 = 0.0;
    for size in 1..=cap {
        for set in (0..d).combinations(size) {
            let top = max_sign_norm(ctx, &set);
            for coeffs in (0..size).map(|_| magnitudes(tau)).multi_cartesian_product() {
                let rhs = ctx.norm(&combo_vector(d, &set, &coeffs));
                if 2 * size <= d {
                    half_sup = half_sup.max(top / rhs);
                }
                t.record(top, Some(rhs), || {
                    Violation::new(top, rhs, format!("coefficients {coeffs:?}"))
                        .with_sets(vec![IndexSet::new(set.clone())])
                });
            }
        }
    }
    let mut notes = ctx.base_notes();
    notes.insert("tau".into(), json!(tau));
    notes.insert("set_size_cap".into(), json!(cap));
    notes.insert("sup_half_dimension".into(), json!(half_sup));
    Ok(t.finish("property_p_tau", &ctx.label, notes))
}

/// Splits disjoint equal-size `a`, `b` as `a = a1 ∪ a2`, `b = b1 ∪ b2`
/// with `a1 < b1` and `a2 > b2`: `a1` is the first `j` of `a`, `b1` the
/// last `j` of `b`.
pub fn crossing_split(a: &[usize], b: &[usize]) -> Option<usize> {
    let k = a.len();
    (0..=k).find(|&j| {
        let first_ok = j == 0 || a[j - 1] < b[k - j];
        let second_ok = j == k || a[j] > b[k - j - 1];
        first_ok && second_ok
    })
}

struct Witness {
    x: Vector,
    m: usize,
    competitor: IndexSet,
    expected_selection: IndexSet,
    /// Closed forms of `‖x − 𝒢_m x‖` and `‖x − P_competitor x‖`.
    expected: (f64, f64),
    label: &'static str,
}

/// Consequences of the branch-algorithm bound: collects ratios
/// `‖x − 𝒢_m^τ x‖ / ‖x − P_A x‖` over admissible `A` on the θ-scaled
/// witnesses and a corpus, takes their supremum `C`, and asserts
/// `Γ_c, Γ_r ≤ C/θ` and
/// `max_± ‖Σ_A ±e_i‖ ≤ C²(2K_b+1)/θ² ‖Σ_A a_i e_i‖`.
pub fn check_bga_theorems(ctx: &Context) -> Result<CheckReport> {
    let d = ctx.space.dim();
    let tau = ctx.config.tau;
    let selector = BranchSelectorSpec::new(tau, ctx.config.selector)?;
    let thetas = [tau / 2.0, 0.99 * tau];
    let kb = ctx.constants.basis;
    let mut t = Tally::new(None);
    let mut reproduced = 0usize;

    // (set, coefficients, theta) for the sign bound.
    let mut sign_cases: Vec<(Vec<usize>, Vec<f64>, f64)> = Vec::new();
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut unsplit = 0usize;
    let cap = ctx.size_cap.min(d / 2).min(3);
    for size in 1..=cap {
        for a in (0..d).combinations(size) {
            let rest: Vec<usize> = (0..d).filter(|i| !a.contains(i)).collect();
            let mut partners = vec![rest[..size].to_vec(), rest[rest.len() - size..].to_vec()];
            partners.dedup();
            for b in partners {
                let Some(j) = crossing_split(&a, &b) else {
                    unsplit += 1;
                    continue;
                };
                let parts = [
                    (a[..j].to_vec(), b[size - j..].to_vec(), "left-part witness"),
                    (
                        a[j..].to_vec(),
                        b[..size - j].to_vec(),
                        "right-part witness",
                    ),
                ];
                for coeffs in (0..size)
                    .map(|_| [1.0, 1.0 / (tau * tau)])
                    .multi_cartesian_product()
                {
                    for &theta in &thetas {
                        sign_cases.push((a.clone(), coeffs.clone(), theta));
                        for (aj, bj, label) in &parts {
                            if aj.is_empty() {
                                continue;
                            }
                            let aj_coeffs: Vec<f64> = aj
                                .iter()
                                .map(|i| coeffs[a.iter().position(|p| p == i).unwrap()])
                                .collect();
                            let big = combo_vector(d, aj, &aj_coeffs);
                            let small =
                                Vector::scaled_indicator(d, &IndexSet::new(bj.clone()), theta);
                            witnesses.push(Witness {
                                x: big.add(&small),
                                m: aj.len(),
                                competitor: IndexSet::new(bj.clone()),
                                expected_selection: IndexSet::new(aj.clone()),
                                expected: (ctx.norm(&small), ctx.norm(&big)),
                                label,
                            });
                            for signs in
                                (0..aj.len()).map(|_| [1.0, -1.0]).multi_cartesian_product()
                            {
                                let low = combo_vector(
                                    d,
                                    aj,
                                    &signs.iter().map(|s| s * theta).collect::<Vec<_>>(),
                                );
                                let high = Vector::indicator(d, &IndexSet::new(bj.clone()));
                                witnesses.push(Witness {
                                    x: high.add(&low),
                                    m: bj.len(),
                                    competitor: IndexSet::new(aj.clone()),
                                    expected_selection: IndexSet::new(bj.clone()),
                                    expected: (ctx.norm(&low), ctx.norm(&high)),
                                    label,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let c = &ctx.constants;
    for est in [&c.conservative, &c.reverse_conservative] {
        if let Some(ConstWitness::Sets { a, b }) = &est.witness {
            for &theta in &thetas {
                let low = Vector::scaled_indicator(d, a, theta);
                let high = Vector::indicator(d, b);
                witnesses.push(Witness {
                    x: low.add(&high),
                    m: b.len(),
                    competitor: a.clone(),
                    expected_selection: b.clone(),
                    expected: (ctx.norm(&low), ctx.norm(&high)),
                    label: "conservative witness",
                });
            }
        }
    }

    for w in &witnesses {
        let run = bga(&w.x, w.m, &selector)?;
        let lhs = ctx.norm(&w.x.sub(&run.approx));
        let rhs = ctx.norm(&w.x.remove(&w.competitor));
        let admissible = w
            .competitor
            .precedes(&IndexSet::new(vec![run.alpha().unwrap()]))
            || IndexSet::new(vec![run.beta().unwrap()]).precedes(&w.competitor);
        let matches = run.indices == w.expected_selection
            && (lhs - w.expected.0).abs() <= REPRODUCE_TOL
            && (rhs - w.expected.1).abs() <= REPRODUCE_TOL;
        if !(matches && admissible) {
            t.fail(
                Violation::new(lhs, rhs, format!("{} not reproduced", w.label))
                    .at(&w.x, w.m)
                    .with_sets(vec![run.indices.clone(), w.competitor.clone()]),
            );
        } else {
            reproduced += 1;
        }
        t.record(lhs, Some(rhs), || unreachable!());
    }

    let corpus_tally = tally_corpus(ctx.heavy_corpus(), None, |x, t| {
        let m_cap = x.support().len().min(if d > 8 { 4 } else { d });
        for m in 1..=m_cap {
            let Ok(run) = bga(x, m, &selector) else {
                continue;
            };
            let lhs = ctx.norm(&x.sub(&run.approx));
            let mut sets = candidate_sets(&left_pool(d, run.alpha()), SetSize::AtMost(m), true);
            sets.extend(candidate_sets(
                &right_pool(d, run.beta()),
                SetSize::AtMost(m),
                true,
            ));
            for set in sets {
                let (rhs, _) = best_on_set(ctx.space, x.coeffs(), &set, Coefficients::Projection);
                t.record(lhs, Some(rhs), || unreachable!());
            }
        }
    });
    t = t.merge(corpus_tally);
    let c_emp = t.max_ratio.max(0.0);

    let theta = thetas[1];
    let sign_factor = c_emp * c_emp * (2.0 * kb + 1.0);
    let mut tau_form_holds = true;
    for (set, coeffs, th) in &sign_cases {
        let lhs = max_sign_norm(ctx, set);
        let rhs = ctx.norm(&combo_vector(d, set, coeffs));
        let allowed = sign_factor / (th * th) * rhs;
        tau_form_holds &= lhs <= sign_factor / tau * rhs + REPRODUCE_TOL;
        t.assert_le(lhs, allowed, || {
            Violation::new(lhs, allowed, format!("sign bound, theta={th}"))
                .with_sets(vec![IndexSet::new(set.clone())])
        });
    }
    let mut conservative_tau_form = BTreeMap::new();
    for (name, est) in [
        ("gamma_c", &c.conservative),
        ("gamma_r", &c.reverse_conservative),
    ] {
        let allowed = c_emp / theta;
        t.assert_le(est.value, allowed, || {
            Violation::new(est.value, allowed, format!("{name} ≤ C/θ"))
        });
        conservative_tau_form.insert(
            name.to_string(),
            json!(est.value <= c_emp / tau + REPRODUCE_TOL),
        );
    }

    let mut notes = ctx.base_notes();
    notes.insert("tau".into(), json!(tau));
    notes.insert("thetas".into(), json!(thetas));
    notes.insert("selector".into(), json!(ctx.config.selector));
    notes.insert("branch_constant".into(), json!(c_emp));
    notes.insert("witnesses_reproduced".into(), json!(reproduced));
    notes.insert("witnesses_total".into(), json!(witnesses.len()));
    notes.insert("pairs_without_split".into(), json!(unsplit));
    notes.insert("sign_bound_over_tau_holds".into(), json!(tau_form_holds));
    notes.insert(
        "conservative_over_tau_holds".into(),
        Value::Object(conservative_tau_form.into_iter().collect()),
    );
    Ok(t.finish("bga_theorems", &ctx.label, notes))
}

fn sup_note(t: &Tally) -> Value {
    json!(t.max_ratio.is_finite().then_some(t.max_ratio))
}

/// Weak versus strict thresholding: the greedy policy must reproduce the
/// TGA exactly (as must the largest-coefficient branch selector); the lazy
/// policy's ratio `‖x − G_m^τ x‖ / ‖x − G_m x‖` and the ratio against
/// competitors overlapping `Λ_m^τ` in at most `⌊λm⌋` indices must stay
/// finite.
pub fn check_wtga_vs_tga(ctx: &Context) -> Result<CheckReport> {
    let d = ctx.space.dim();
    let tau = ctx.config.tau;
    let largest = BranchSelectorSpec::new(tau, BranchRule::LargestCoefficient)?;
    let identity = tally_corpus(&ctx.corpus, None, |x, t| {
        for m in 1..=d {
            let strict = tga(x, m).expect("m in range");
            let (_, weak) = wtga(x, m, tau, WeakPolicy::Greedy).expect("valid tau");
            if weak.coeffs() != strict.coeffs() {
                t.fail(Violation::new(0.0, 0.0, "greedy-policy WTGA differs from TGA").at(x, m));
            }
            if m <= x.support().len() {
                let run = bga(x, m, &largest).expect("m within support");
                if run.approx.coeffs() != strict.coeffs() {
                    t.fail(
                        Violation::new(0.0, 0.0, "largest-coefficient BGA differs from TGA")
                            .at(x, m),
                    );
                }
            }
            t.instances += 1;
        }
    });
    let lazy = tally_corpus(&ctx.corpus, None, |x, t| {
        for m in 1..=d {
            let strict = ctx.norm(&x.sub(&tga(x, m).expect("m in range")));
            let (_, weak) = wtga(x, m, tau, WeakPolicy::Lazy).expect("valid tau");
            let lhs = ctx.norm(&x.sub(&weak));
            t.record(lhs, Some(strict), || {
                Violation::new(lhs, strict, "lazy ratio").at(x, m)
            });
        }
    });
    let m_cap = if d > 8 { 4 } else { d };
    let mut overlap = Tally::new(None);
    let mut overlap_sups = BTreeMap::new();
    for lambda_frac in [0.0, 0.5] {
        let part = tally_corpus(ctx.heavy_corpus(), None, |x, t| {
            for m in 1..=m_cap {
                let (sel, weak) = wtga(x, m, tau, WeakPolicy::Lazy).expect("valid tau");
                let lhs = ctx.norm(&x.sub(&weak));
                let budget = (lambda_frac * m as f64).floor() as usize;
                let sets = overlap_sets(d, &sel.indices, budget, m, ctx.space.is_absolute());
                let e = minimize_over_sets(
                    ctx.space,
                    x.coeffs(),
                    sets,
                    Coefficients::Free,
                    Functional::Sigma,
                );
                t.record(lhs, e.value, || {
                    Violation::new(lhs, e.value_or_inf(), "overlap ratio").at(x, m)
                });
            }
        });
        overlap_sups.insert(format!("{lambda_frac}"), sup_note(&part));
        overlap = overlap.merge(part);
    }
    let mut notes = ctx.base_notes();
    notes.insert("tau".into(), json!(tau));
    notes.insert("greedy_policy_ratio".into(), json!(1.0));
    notes.insert("lazy_sup".into(), sup_note(&lazy));
    notes.insert(
        "overlap_sup_by_lambda".into(),
        Value::Object(overlap_sups.into_iter().collect()),
    );
    Ok(identity
        .merge(lazy)
        .merge(overlap)
        .finish("wtga_vs_tga", &ctx.label, notes))
}
