//! Characterizations of bases whose partially greedy (or reverse partially
//! greedy) constant equals 1, tested from both sides.

use serde_json::json;

use super::{tally_corpus, CheckReport, Context, Tally, Violation};
use crate::error::Result;
use crate::vector::{IndexSet, Vector};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// Competitors left of the greedy index.
    Forward,
    /// Competitors right of the greedy index.
    Reverse,
}

impl Direction {
    fn admits(self, competitor: usize, reference: usize) -> bool {
        match self {
            Direction::Forward => competitor < reference,
            Direction::Reverse => competitor > reference,
        }
    }
}

/// The corpus thinned out so that there are coordinates outside the
/// support, plus the zero vector.
fn sparse_corpus(ctx: &Context) -> Vec<Vector> {
    let d = ctx.space.dim();
    let mut out = vec![Vector::zeros(d)];
    for (slot, x) in ctx.corpus.iter().enumerate() {
        for stride in [2, 3] {
            let v: Vec<f64> = (0..d)
                .map(|i| {
                    if (i + slot) % stride == 0 {
                        0.0
                    } else {
                        x.get(i)
                    }
                })
                .collect();
            out.push(Vector::new(v).expect("finite"));
        }
    }
    out
}

/// `‖x − G_1 x‖ ≤ min(‖x‖, ‖x − x_j e_j‖)` for admissible `j`.
fn one_term_condition(ctx: &Context, dir: Direction) -> Tally {
    let d = ctx.space.dim();
    tally_corpus(&ctx.corpus, Some(1.0), |x, t| {
        let nx = ctx.norm(x);
        for lambda in ctx.greedy_variants(x, 1) {
            let k = lambda.as_slice()[0];
            let lhs = ctx.norm(&x.with(k, 0.0));
            t.record(lhs, Some(nx), || {
                Violation::new(lhs, nx, "against ‖x‖").at(x, 1)
            });
            for j in (0..d).filter(|&j| dir.admits(j, k)) {
                let rhs = ctx.norm(&x.with(j, 0.0));
                t.record(lhs, Some(rhs), || {
                    Violation::new(lhs, rhs, format!("removing index {}", j + 1))
                        .at(x, 1)
                        .with_sets(vec![lambda.clone(), IndexSet::new(vec![j])])
                });
            }
        }
    })
}

/// `max(‖x‖, ‖x + s e_j‖) ≤ ‖x + t e_k‖` for `j, k ∉ supp x` in the given
/// order and `|s| = |t| ≥ max|x_i|`.
fn norm_condition(ctx: &Context, dir: Direction) -> Tally {
    let d = ctx.space.dim();
    let corpus = sparse_corpus(ctx);
    tally_corpus(&corpus, Some(1.0), |x, t| {
        let top = x.max_abs();
        let base = if top > 0.0 { top } else { 1.0 };
        let nx = ctx.norm(x);
        let free: Vec<usize> = (0..d).filter(|&i| x.get(i) == 0.0).collect();
        for &j in &free {
            for &k in free.iter().filter(|&&k| dir.admits(j, k)) {
                for mag in [base, 2.0 * base] {
                    for s in [mag, -mag] {
                        let lhs = nx.max(ctx.norm(&x.with(j, s)));
                        for tt in [mag, -mag] {
                            let rhs = ctx.norm(&x.with(k, tt));
                            t.record(lhs, Some(rhs), || {
                                Violation::new(
                                    lhs,
                                    rhs,
                                    format!("j={} k={} s={s} t={tt}", j + 1, k + 1),
                                )
                                .with_sets(vec![IndexSet::new(vec![j]), IndexSet::new(vec![k])])
                                .at(x, 1)
                            });
                        }
                    }
                }
            }
        }
    })
}

fn run(ctx: &Context, dir: Direction, name: &str) -> CheckReport {
    let one_term = one_term_condition(ctx, dir);
    let norm = norm_condition(ctx, dir);
    let first_holds = one_term.violation_count == 0;
    let second_holds = norm.violation_count == 0;
    let mut notes = ctx.base_notes();
    notes.insert("one_term_condition_holds".into(), json!(first_holds));
    notes.insert("norm_condition_holds".into(), json!(second_holds));
    notes.insert(
        "conditions_agree".into(),
        json!(first_holds == second_holds),
    );
    one_term.merge(norm).finish(name, &ctx.label, notes)
}

pub fn check_one_pg(ctx: &Context) -> Result<CheckReport> {
    Ok(run(ctx, Direction::Forward, "one_pg"))
}

pub fn check_one_pg_reverse(ctx: &Context) -> Result<CheckReport> {
    Ok(run(ctx, Direction::Reverse, "one_pg_reverse"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;
    use crate::verify::VerifyConfig;

    fn ctx(space: &SpaceSpec) -> Context<'_> {
        let cfg = VerifyConfig {
            corpus_size: 100,
            ..VerifyConfig::default()
        };
        Context::new(space, cfg).unwrap()
    }

    #[test]
    fn lp_spaces_pass_both_directions() {
        for p in [1.0, 2.0, f64::INFINITY] {
            let s = SpaceSpec::lp(5, p).unwrap();
            let c = ctx(&s);
            assert!(check_one_pg(&c).unwrap().pass, "p={p}");
            assert!(check_one_pg_reverse(&c).unwrap().pass, "p={p}");
        }
    }

    #[test]
    fn increasing_weights_fail_reverse_only() {
        let s = SpaceSpec::weighted_l1(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = ctx(&s);
        assert!(check_one_pg(&c).unwrap().pass);
        let r = check_one_pg_reverse(&c).unwrap();
        assert!(!r.pass);
        assert_eq!(r.notes["conditions_agree"], json!(true));
        let first = &norm_condition(&c, Direction::Reverse).violations[0];
        assert_eq!(first.x.as_deref(), Some(&[0.0; 4][..]));
        assert_eq!((first.lhs, first.rhs), (2.0, 1.0));
        assert_eq!(
            first.sets,
            vec![IndexSet::new(vec![1]), IndexSet::new(vec![0])]
        );
    }
}
