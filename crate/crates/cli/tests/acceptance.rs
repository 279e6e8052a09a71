//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the summary lines are
//! always printed by `cargo test`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use itertools::Itertools;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use greedy_bases::constants::{
    conservative_constant, democratic_constant, reverse_conservative_constant, ConstWitness,
    Exactness,
};
use greedy_bases::corpus::{generate, CorpusSpec};
use greedy_bases::functionals::{
    dist_indicator, sigma, sigma_left, sigma_right, sigma_tilde, sigma_tilde_left,
    sigma_tilde_right,
};
use greedy_bases::greedy::{bga, greedy_ordering, tga, wtga};
use greedy_bases::verify::{CheckId, CheckReport, Context, VerifyConfig};
use greedy_bases::{
    BranchRule, BranchSelectorSpec, IndexSet, NormedSpace, Side, SpaceSpec, Vector, WeakPolicy,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Independent model of the n = 3 example space (dimension 12, 1-based
// ranges [m!, 12] with at most m! active coordinates for m = 1, 2, 3).

const FACTORIALS: [usize; 3] = [1, 2, 6];

fn example_norm_oracle(x: &[f64]) -> f64 {
    FACTORIALS
        .iter()
        .map(|&k| {
            let mut tail: Vec<f64> = x[k - 1..].iter().map(|v| v.abs()).collect();
            tail.sort_by(|a, b| b.total_cmp(a));
            tail.iter().take(k).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `sup { ⟨f, x⟩ : ‖x‖ ≤ 1 }` for `f ≥ 0` by an LP over `x ≥ 0`.
fn example_dual_oracle(f: &[f64]) -> f64 {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = f
        .iter()
        .map(|&c| problem.add_var(c, (0.0, f64::INFINITY)))
        .collect();
    for &k in &FACTORIALS {
        let range: Vec<usize> = (k - 1..f.len()).collect();
        let size = k.min(range.len());
        for row in range.into_iter().combinations(size) {
            let terms: Vec<_> = row.iter().map(|&i| (vars[i], 1.0)).collect();
            problem.add_constraint(terms.as_slice(), ComparisonOp::Le, 1.0);
        }
    }
    problem.solve().expect("bounded LP").objective()
}

fn block(lo: usize, hi: usize) -> Vec<f64> {
    (1..=12)
        .map(|i| if (lo..=hi).contains(&i) { 1.0 } else { 0.0 })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let space = SpaceSpec::example(3).map_err(err)?;
    let dual = SpaceSpec::dual_of(space.clone()).map_err(err)?;
    let (low, high) = (block(1, 6), block(7, 12));
    let n_low = space.eval(&low);
    let n_high = space.eval(&high);
    ensure(n_low == 2.0 && n_high == 6.0, || {
        format!("norms {n_low}, {n_high}")
    })?;
    ensure(
        example_norm_oracle(&low) == 2.0 && example_norm_oracle(&high) == 6.0,
        || "oracle disagrees on the indicator norms".into(),
    )?;
    let d_high = dual.eval(&high);
    ensure(d_high == 1.0, || {
        format!("dual norm of 1_[7,12] = {d_high}")
    })?;
    let d_low = dual.eval(&low);
    let oracle = example_dual_oracle(&low);
    ensure(d_low >= 3.0, || {
        format!("dual norm of 1_[1,6] = {d_low} < 3")
    })?;
    ensure((d_low - oracle).abs() <= 1e-9, || {
        format!("dual norm {d_low} vs LP oracle {oracle}")
    })?;
    ensure(
        (dual.eval(&high) - example_dual_oracle(&high)).abs() <= 1e-9,
        || "oracle on 1_[7,12]".into(),
    )?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "‖1_[1,6]‖=2, ‖1_[7,12]‖=6, dual {d_low} (oracle {oracle}) and {d_high}, {:.2?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let space = SpaceSpec::example(3).map_err(err)?;
    let conservative = conservative_constant(&space, 6).map_err(err)?;
    ensure(
        conservative.value == 1.0 && conservative.exactness == Exactness::Exact,
        || {
            format!(
                "conservative constant {:?} ({:?})",
                conservative.value, conservative.exactness
            )
        },
    )?;
    let democratic = democratic_constant(&space, 6).map_err(err)?;
    ensure(democratic.value >= 3.0, || {
        format!("democratic constant {}", democratic.value)
    })?;
    let expected = ConstWitness::Sets {
        a: IndexSet::range(6, 12),
        b: IndexSet::range(0, 6),
    };
    ensure(democratic.witness.as_ref() == Some(&expected), || {
        format!("democratic witness {:?}", democratic.witness)
    })?;

    let dual = SpaceSpec::dual_of(space).map_err(err)?;
    let reverse = reverse_conservative_constant(&dual, 6).map_err(err)?;
    ensure(reverse.value == 1.0, || {
        format!("dual reverse-conservative constant {}", reverse.value)
    })?;
    let dual_democratic = democratic_constant(&dual, 6).map_err(err)?;
    let ratio = dual.eval(&block(1, 6)) / dual.eval(&block(7, 12));
    ensure(dual_democratic.value >= 3.0 && ratio >= 3.0, || {
        format!("dual democratic {} ratio {ratio}", dual_democratic.value)
    })?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "Γ_c=1 exact, Γ={} at A=[7,12] B=[1,6]; dual Γ_r=1, Γ={} (pair ratio {ratio}), {:.2?}",
        democratic.value,
        dual_democratic.value,
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// Dense-grid brute force.

const COEFF_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

fn sigma_oracle(space: &SpaceSpec, x: &[f64], m: usize) -> f64 {
    let d = x.len();
    let mut best = f64::INFINITY;
    let mut buf = x.to_vec();
    for set in (0..d).combinations(m) {
        for coeffs in (0..m).map(|_| COEFF_GRID).multi_cartesian_product() {
            for (&i, &c) in set.iter().zip(&coeffs) {
                buf[i] = x[i] - c;
            }
            best = best.min(space.eval(&buf));
        }
        for &i in &set {
            buf[i] = x[i];
        }
    }
    best
}

/// Minimum of a convex function on `[lo, hi]` by a grid followed by two
/// refinements around the best point.
fn grid_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let mut scan = |lo: f64, hi: f64, step: f64| {
        let n = ((hi - lo) / step).ceil() as usize;
        let mut best = (lo, f64::INFINITY);
        for k in 0..=n {
            let a = (lo + k as f64 * step).min(hi);
            let v = f(a);
            if v < best.1 {
                best = (a, v);
            }
        }
        best
    };
    let (mut a, mut v) = scan(lo, hi, 1e-3);
    for step in [1e-6, 1e-9] {
        let h = step * 1000.0;
        (a, v) = scan(a - h, a + h, step);
    }
    v
}

fn dist_oracle(space: &SpaceSpec, x: &[f64], m: usize) -> f64 {
    let d = x.len();
    let top = x.iter().fold(0.0f64, |t, v| t.max(v.abs())) + 1.0;
    (0..d)
        .combinations(m)
        .map(|set| {
            let mut buf = x.to_vec();
            grid_min(
                |a| {
                    for &i in &set {
                        buf[i] = x[i] - a;
                    }
                    space.eval(&buf)
                },
                -top,
                top,
            )
        })
        .fold(f64::INFINITY, f64::min)
}

fn grid_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| COEFF_GRID[rng.gen_range(0..COEFF_GRID.len())])
                .collect()
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let spaces = [
        SpaceSpec::lp(6, 1.0).map_err(err)?,
        SpaceSpec::lp(6, 2.0).map_err(err)?,
        SpaceSpec::example(2).map_err(err)?,
    ];
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for (k, space) in spaces.iter().enumerate() {
        let vectors = grid_vectors(space.dim(), 200, 7 + k as u64);
        let gaps: Vec<Result<(f64, usize), String>> = vectors
            .par_iter()
            .map(|x| {
                let v = Vector::new(x.clone()).map_err(err)?;
                let mut gap = 0.0f64;
                let mut n = 0;
                for m in 0..=space.dim() {
                    let lib = sigma(space, &v, m).map_err(err)?.value.unwrap();
                    let oracle = sigma_oracle(space, x, m);
                    gap = gap.max((lib - oracle).abs());
                    let lib = dist_indicator(space, &v, m, Side::Unconstrained)
                        .map_err(err)?
                        .value
                        .unwrap();
                    let oracle = dist_oracle(space, x, m);
                    gap = gap.max((lib - oracle).abs());
                    n += 2;
                    if gap > 1e-6 {
                        return Err(format!("{space} x={x:?} m={m}: gap {gap}"));
                    }
                }
                Ok((gap, n))
            })
            .collect();
        for g in gaps {
            let (gap, n) = g?;
            worst = worst.max(gap);
            compared += n;
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "{compared} values on lp:1, lp:2 (d=6) and example:2, max gap {worst:.1e}, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------

fn context(space: &SpaceSpec, corpus: usize) -> Result<Context<'_>, String> {
    let config = VerifyConfig {
        corpus_size: corpus,
        ..VerifyConfig::default()
    };
    Context::new(space, config).map_err(err)
}

fn describe(r: &CheckReport) -> String {
    format!(
        "{} on {}: pass={} violations={} max_ratio={:?} bound={:?}",
        r.check, r.space, r.pass, r.violation_count, r.max_ratio, r.bound
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let spaces = [
        SpaceSpec::lp(6, 1.0).map_err(err)?,
        SpaceSpec::lp(6, 2.0).map_err(err)?,
        SpaceSpec::lp(6, f64::INFINITY).map_err(err)?,
        SpaceSpec::example(2).map_err(err)?,
        SpaceSpec::example(3).map_err(err)?,
        SpaceSpec::dual_of(SpaceSpec::example(2).map_err(err)?).map_err(err)?,
    ];
    let checks = [
        CheckId::SignUnconditionality,
        CheckId::MinInequality,
        CheckId::PgBound,
        CheckId::PropertyStar,
        CheckId::Crd,
    ];
    let mut instances = 0;
    for space in &spaces {
        let ctx = context(space, 1000)?;
        ensure(
            ctx.constants.all_exact()
                && ctx.constants.quasi_greedy == 1.0
                && ctx.constants.basis == 1.0,
            || format!("constants of {space} are not exact"),
        )?;
        for id in checks {
            let r = id.run(&ctx).map_err(err)?;
            ensure(r.pass && r.violation_count == 0, || describe(&r))?;
            instances += r.instances;
            if space.to_string() == "example:3" {
                match id {
                    CheckId::PgBound => ensure(r.bound == Some(10.0), || describe(&r))?,
                    CheckId::PropertyStar => ensure(r.bound == Some(36.0), || describe(&r))?,
                    CheckId::MinInequality => ensure(r.bound == Some(4.0), || describe(&r))?,
                    _ => {}
                }
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!(
        "5 suites × {} spaces, {instances} instances, no violations, {:.2?}",
        spaces.len(),
        start.elapsed()
    ))
}

fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * (1.0 + b.abs())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut spaces = vec![SpaceSpec::example(2).map_err(err)?];
    for d in 2..=6 {
        for p in [1.0, 2.0, f64::INFINITY] {
            spaces.push(SpaceSpec::lp(d, p).map_err(err)?);
        }
        spaces.push(SpaceSpec::weighted_l1((1..=d).map(|i| i as f64).collect()).map_err(err)?);
    }
    let grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
    let instances: Vec<(usize, Vec<f64>, usize)> = (0..10_000)
        .map(|_| {
            let s = rng.gen_range(0..spaces.len());
            let d = spaces[s].dim();
            let x = (0..d)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        grid[rng.gen_range(0..grid.len())]
                    } else {
                        rng.gen_range(-3.0..3.0)
                    }
                })
                .collect();
            (s, x, rng.gen_range(0..=d))
        })
        .collect();
    let failures: Vec<String> = instances
        .par_iter()
        .filter_map(|(s, x, m)| {
            let (space, m) = (&spaces[*s], *m);
            let v = Vector::new(x.clone()).unwrap();
            let val = |e: greedy_bases::Result<greedy_bases::ErrorValue>| e.unwrap().value;
            let sg = val(sigma(space, &v, m)).unwrap();
            let st = val(sigma_tilde(space, &v, m)).unwrap();
            let stl = val(sigma_tilde_left(space, &v, m)).unwrap();
            let str_ = val(sigma_tilde_right(space, &v, m)).unwrap();
            let mut ok = le(sg, st) && le(st, stl) && le(st, str_);
            if m < space.dim() {
                ok &= le(val(sigma(space, &v, m + 1)).unwrap(), sg);
                ok &= le(val(sigma_tilde(space, &v, m + 1)).unwrap(), st);
            }
            if m >= 1 {
                let sel = greedy_ordering(&v).at(m).unwrap();
                let (alpha, beta) = (sel.alpha().unwrap() + 1, sel.beta().unwrap() + 1);
                let d = space.dim();
                ok &= val(sigma_left(space, &v, m)).is_none() == (alpha <= m);
                ok &= val(sigma_right(space, &v, m)).is_none() == (beta + m > d);
            } else {
                ok &= val(sigma_left(space, &v, 0)).is_some()
                    && val(sigma_right(space, &v, 0)).is_some();
            }
            (!ok).then(|| format!("{space} x={x:?} m={m}"))
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!(
        "10000 instances over {} spaces, {:.2?}",
        spaces.len(),
        start.elapsed()
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    for p in [1.0, 2.0, f64::INFINITY] {
        let space = SpaceSpec::lp(6, p).map_err(err)?;
        let ctx = context(&space, 1000)?;
        for id in [CheckId::OnePg, CheckId::OnePgReverse] {
            let r = id.run(&ctx).map_err(err)?;
            ensure(r.pass, || describe(&r))?;
        }
    }
    let weighted = SpaceSpec::weighted_l1(vec![1.0, 2.0, 3.0, 4.0]).map_err(err)?;
    let ctx = context(&weighted, 1000)?;
    let forward = CheckId::OnePg.run(&ctx).map_err(err)?;
    ensure(forward.pass, || describe(&forward))?;
    let reverse = CheckId::OnePgReverse.run(&ctx).map_err(err)?;
    ensure(!reverse.pass, || {
        "reverse check passed on increasing weights".into()
    })?;
    let witness = reverse.violations.first().ok_or("no witness emitted")?;
    ensure(witness.x.is_some() && witness.lhs > witness.rhs, || {
        format!("{witness:?}")
    })?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "lp:1, lp:2, lp:inf pass both sides; weighted:1,2,3,4 reverse fails ({} violations, first lhs {} > rhs {}), {:.2?}",
        reverse.violation_count,
        witness.lhs,
        witness.rhs,
        start.elapsed()
    ))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let corpus = generate(&CorpusSpec::new(6, 1000, 42));
    let largest = BranchSelectorSpec::new(0.5, BranchRule::LargestCoefficient).map_err(err)?;
    let mut compared = 0;
    for x in &corpus {
        for m in 1..=6 {
            let strict = tga(x, m).map_err(err)?;
            let (_, weak) = wtga(x, m, 0.5, WeakPolicy::Greedy).map_err(err)?;
            let same_weak = weak
                .coeffs()
                .iter()
                .zip(strict.coeffs())
                .all(|(a, b)| a.to_bits() == b.to_bits());
            ensure(same_weak, || {
                format!("WTGA differs from TGA at x={:?} m={m}", x.coeffs())
            })?;
            if m <= x.support().len() {
                let run = bga(x, m, &largest).map_err(err)?;
                let same = run
                    .approx
                    .coeffs()
                    .iter()
                    .zip(strict.coeffs())
                    .all(|(a, b)| a.to_bits() == b.to_bits());
                ensure(same, || {
                    format!("BGA differs from TGA at x={:?} m={m}", x.coeffs())
                })?;
            }
            compared += 1;
        }
    }
    let space = SpaceSpec::example(2).map_err(err)?;
    let ctx = context(&space, 1000)?;
    let weak = CheckId::WtgaVsTga.run(&ctx).map_err(err)?;
    ensure(weak.pass, || describe(&weak))?;
    let lazy_sup = weak.notes["lazy_sup"]
        .as_f64()
        .ok_or("lazy ratio not reported")?;
    ensure(lazy_sup.is_finite(), || format!("lazy sup {lazy_sup}"))?;
    let branch = CheckId::BgaTheorems.run(&ctx).map_err(err)?;
    let reproduced = &branch.notes["witnesses_reproduced"];
    let total = &branch.notes["witnesses_total"];
    ensure(branch.pass && reproduced == total, || describe(&branch))?;
    Ok(format!(
        "{compared} (x, m) pairs bit-identical; lazy sup {lazy_sup:.4} on example:2; {reproduced}/{total} θ-witnesses reproduced, {:.2?}",
        start.elapsed()
    ))
}

fn criterion_8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_greedy-bases"))
            .args([
                "verify",
                "--space",
                "example:2",
                "--suite",
                "all",
                "--seed",
                "42",
            ])
            .output()
            .map_err(err)
    };
    let (first, second) = (run()?, run()?);
    ensure(!first.stdout.is_empty(), || {
        String::from_utf8_lossy(&first.stderr).into_owned()
    })?;
    ensure(
        first.stdout == second.stdout && first.status == second.status,
        || "outputs differ between runs".into(),
    )?;
    let lines = first.stdout.iter().filter(|&&b| b == b'\n').count();
    ensure(lines == CheckId::ALL.len(), || {
        format!("{lines} report lines")
    })?;
    Ok(format!(
        "{lines} JSON lines, {} bytes, identical across runs",
        first.stdout.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("example-space values", criterion_1),
        ("example-space constants", criterion_2),
        ("oracle equivalence", criterion_3),
        ("inequality suites", criterion_4),
        ("functional lattice", criterion_5),
        ("1-partially-greedy characterization", criterion_6),
        ("weak and branch algorithms", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
