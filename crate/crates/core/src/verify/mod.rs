//! Inequality checks over constructed and seeded corpora.
//!
//! Each check returns a [`CheckReport`]. A check with a `bound` asserts
//! `lhs ≤ bound · rhs` per instance; a check without one only asserts that
//! the observed ratios stay finite, and reports the supremum. Instances
//! whose right-hand side is infeasible or zero are counted as vacuous.

mod greedy_checks;
mod one_pg;
mod set_checks;
mod weak_checks;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::constants::{
    conservative_constant_from, democratic_constant_from, reverse_conservative_constant_from,
    ConstantEstimate, Exactness, IndicatorTable,
};
use crate::corpus::{generate, CorpusSpec};
use crate::error::{Error, Result};
use crate::greedy::{greedy_sets, BranchRule};
use crate::space::{basis_constant, NormedSpace, SpaceSpec};
use crate::vector::{IndexSet, Vector};

pub use greedy_checks::{
    check_agmin, check_gag, check_gag_lambda, check_indicator_characterization,
    check_min_inequality, check_pg_bound, check_property_star, check_property_star_star,
    check_remark_liminf,
};
pub use one_pg::{check_one_pg, check_one_pg_reverse};
pub use set_checks::{check_crd, check_sign_unconditionality};
pub use weak_checks::{check_bga_theorems, check_property_p_tau, check_wtga_vs_tga};

const MAX_LISTED_VIOLATIONS: usize = 20;
const ABS_TOL: f64 = 1e-9;
const REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<IndexSet>,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

impl Violation {
    pub fn new(lhs: f64, rhs: f64, detail: impl Into<String>) -> Self {
        Self {
            x: None,
            m: None,
            sets: Vec::new(),
            lhs,
            rhs,
            detail: detail.into(),
        }
    }

    pub fn at(mut self, x: &Vector, m: usize) -> Self {
        self.x = Some(x.coeffs().to_vec());
        self.m = Some(m);
        self
    }

    pub fn with_sets(mut self, sets: Vec<IndexSet>) -> Self {
        self.sets = sets;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub space: String,
    pub instances: usize,
    /// Largest observed `lhs / rhs`; `None` when every instance was vacuous.
    pub max_ratio: Option<f64>,
    /// Asserted constant; `None` when only finiteness is asserted.
    pub bound: Option<f64>,
    /// The first few violations.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub vacuous: usize,
    pub pass: bool,
    pub notes: BTreeMap<String, Value>,
}

/// Accumulates instances of `lhs ≤ bound · rhs`.
#[derive(Clone, Debug)]
pub(crate) struct Tally {
    pub bound: Option<f64>,
    pub instances: usize,
    pub vacuous: usize,
    pub max_ratio: f64,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
}

impl Tally {
    pub fn new(bound: Option<f64>) -> Self {
        Self {
            bound,
            instances: 0,
            vacuous: 0,
            max_ratio: f64::NEG_INFINITY,
            violations: Vec::new(),
            violation_count: 0,
        }
    }

    pub fn vacuous(&mut self) {
        self.instances += 1;
        self.vacuous += 1;
    }

    /// Records one instance. `rhs = None` or `rhs ≤ 1e-12` is vacuous.
    pub fn record(&mut self, lhs: f64, rhs: Option<f64>, witness: impl FnOnce() -> Violation) {
        let Some(rhs) = rhs.filter(|&r| r > crate::constants::ZERO_DENOMINATOR) else {
            self.vacuous();
            return;
        };
        self.instances += 1;
        let ratio = lhs / rhs;
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
        }
        let exceeded = match self.bound {
            Some(c) => lhs > c * rhs + ABS_TOL + REL_TOL * lhs.abs(),
            None => !ratio.is_finite(),
        };
        if exceeded {
            self.fail(witness());
        }
    }

    /// Records a plain assertion `lhs ≤ rhs` that is not a ratio instance.
    pub fn assert_le(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce() -> Violation) {
        self.instances += 1;
        if lhs > rhs + ABS_TOL + REL_TOL * lhs.abs() {
            self.fail(witness());
        }
    }

    pub fn fail(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.vacuous += other.vacuous;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        self
    }

    pub fn finish(self, check: &str, space: &str, notes: BTreeMap<String, Value>) -> CheckReport {
        CheckReport {
            check: check.into(),
            space: space.into(),
            instances: self.instances,
            max_ratio: self.max_ratio.is_finite().then_some(self.max_ratio),
            bound: self.bound,
            pass: self.violation_count == 0,
            violations: self.violations,
            violation_count: self.violation_count,
            vacuous: self.vacuous,
            notes,
        }
    }
}

/// Runs `f` over the corpus in parallel and merges the tallies in order.
pub(crate) fn tally_corpus<F>(corpus: &[Vector], bound: Option<f64>, f: F) -> Tally
where
    F: Fn(&Vector, &mut Tally) + Sync,
{
    corpus
        .par_iter()
        .map(|x| {
            let mut t = Tally::new(bound);
            f(x, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::new(bound), Tally::merge)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub corpus_size: usize,
    /// Size cap for set enumerations; defaults to `min(d, 12)`.
    pub size_cap: Option<usize>,
    /// Corpus size for the checks that enumerate many competing sets.
    pub heavy_corpus_size: usize,
    pub tau: f64,
    pub selector: BranchRule,
    /// Largest number of tie-resolved greedy sets re-checked per instance.
    pub tie_limit: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            corpus_size: 1000,
            size_cap: None,
            heavy_corpus_size: 100,
            tau: 0.5,
            selector: BranchRule::SmallestIndex,
            tie_limit: 24,
        }
    }
}

/// Constants of the space that the bounds are built from.
#[derive(Clone, Debug, Serialize)]
pub struct SpaceConstants {
    pub quasi_greedy: f64,
    pub basis: f64,
    pub democratic: ConstantEstimate,
    pub conservative: ConstantEstimate,
    pub reverse_conservative: ConstantEstimate,
}

impl SpaceConstants {
    pub fn all_exact(&self) -> bool {
        [&self.conservative, &self.reverse_conservative]
            .iter()
            .all(|c| c.exactness == Exactness::Exact)
    }
}

/// Everything a check needs: the space, its constants and the corpus.
pub struct Context<'a> {
    pub space: &'a SpaceSpec,
    pub label: String,
    pub config: VerifyConfig,
    pub size_cap: usize,
    pub table: IndicatorTable,
    pub constants: SpaceConstants,
    pub corpus: Vec<Vector>,
}

impl<'a> Context<'a> {
    pub fn new(space: &'a SpaceSpec, config: VerifyConfig) -> Result<Self> {
        if !(config.tau > 0.0 && config.tau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau = {} must lie in (0, 1)",
                config.tau
            )));
        }
        let d = space.dim();
        let size_cap = config.size_cap.unwrap_or(d.min(12)).min(d).max(1);
        let table = IndicatorTable::build(space, size_cap)?;
        let absolute = space.is_absolute();
        let constants = SpaceConstants {
            quasi_greedy: 1.0,
            basis: basis_constant(space, 0, config.seed).value,
            democratic: democratic_constant_from(&table),
            conservative: conservative_constant_from(&table, absolute),
            reverse_conservative: reverse_conservative_constant_from(&table, absolute),
        };
        let corpus = generate(&CorpusSpec::new(d, config.corpus_size, config.seed));
        Ok(Self {
            space,
            label: space.to_string(),
            config,
            size_cap,
            table,
            constants,
            corpus,
        })
    }

    pub fn heavy_corpus(&self) -> &[Vector] {
        &self.corpus[..self.config.heavy_corpus_size.min(self.corpus.len())]
    }

    /// Valid greedy sets `Λ_m(x)` (all tie resolutions up to the limit).
    pub fn greedy_variants(&self, x: &Vector, m: usize) -> Vec<IndexSet> {
        greedy_sets(x, m, self.config.tie_limit)
            .map(|t| t.sets)
            .unwrap_or_default()
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        self.space.norm_of(x)
    }

    pub(crate) fn base_notes(&self) -> BTreeMap<String, Value> {
        let c = &self.constants;
        let mut notes = BTreeMap::new();
        notes.insert("K".into(), c.quasi_greedy.into());
        notes.insert("K_b".into(), c.basis.into());
        notes.insert("gamma_c".into(), c.conservative.value.into());
        notes.insert("gamma_r".into(), c.reverse_conservative.value.into());
        notes.insert("constants_exact".into(), c.all_exact().into());
        notes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Agmin,
    BgaTheorems,
    Crd,
    Gag,
    GagLambda,
    Indicator,
    MinInequality,
    OnePg,
    OnePgReverse,
    PgBound,
    PropertyPTau,
    PropertyStar,
    PropertyStarStar,
    RemarkLiminf,
    SignUnconditionality,
    WtgaVsTga,
}

impl CheckId {
    /// All checks, sorted by name.
    pub const ALL: [CheckId; 16] = [
        CheckId::Agmin,
        CheckId::BgaTheorems,
        CheckId::Crd,
        CheckId::Gag,
        CheckId::GagLambda,
        CheckId::Indicator,
        CheckId::MinInequality,
        CheckId::OnePg,
        CheckId::OnePgReverse,
        CheckId::PgBound,
        CheckId::PropertyPTau,
        CheckId::PropertyStar,
        CheckId::PropertyStarStar,
        CheckId::RemarkLiminf,
        CheckId::SignUnconditionality,
        CheckId::WtgaVsTga,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Agmin => "agmin",
            CheckId::BgaTheorems => "bga_theorems",
            CheckId::Crd => "crd",
            CheckId::Gag => "gag",
            CheckId::GagLambda => "gag_lambda",
            CheckId::Indicator => "indicator",
            CheckId::MinInequality => "min_inequality",
            CheckId::OnePg => "one_pg",
            CheckId::OnePgReverse => "one_pg_reverse",
            CheckId::PgBound => "pg_bound",
            CheckId::PropertyPTau => "property_p_tau",
            CheckId::PropertyStar => "property_star",
            CheckId::PropertyStarStar => "property_star_star",
            CheckId::RemarkLiminf => "remark_liminf",
            CheckId::SignUnconditionality => "sign_unconditionality",
            CheckId::WtgaVsTga => "wtga_vs_tga",
        }
    }

    pub fn run(self, ctx: &Context) -> Result<CheckReport> {
        match self {
            CheckId::Agmin => check_agmin(ctx),
            CheckId::BgaTheorems => check_bga_theorems(ctx),
            CheckId::Crd => check_crd(ctx),
            CheckId::Gag => check_gag(ctx),
            CheckId::GagLambda => check_gag_lambda(ctx),
            CheckId::Indicator => check_indicator_characterization(ctx),
            CheckId::MinInequality => check_min_inequality(ctx),
            CheckId::OnePg => check_one_pg(ctx),
            CheckId::OnePgReverse => check_one_pg_reverse(ctx),
            CheckId::PgBound => check_pg_bound(ctx),
            CheckId::PropertyPTau => check_property_p_tau(ctx),
            CheckId::PropertyStar => check_property_star(ctx),
            CheckId::PropertyStarStar => check_property_star_star(ctx),
            CheckId::RemarkLiminf => check_remark_liminf(ctx),
            CheckId::SignUnconditionality => check_sign_unconditionality(ctx),
            CheckId::WtgaVsTga => check_wtga_vs_tga(ctx),
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named group of checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suite(pub Vec<CheckId>);

impl FromStr for Suite {
    type Err = Error;

    /// Accepts a check name, `all`, or one of the short aliases
    /// (`pg`, `star`, `star_star`, `one_pg_all`, `weak`, `sets`).
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            let ids: Vec<CheckId> = match part {
                "all" => CheckId::ALL.to_vec(),
                "pg" => vec![CheckId::PgBound],
                "star" => vec![CheckId::PropertyStar],
                "star_star" => vec![CheckId::PropertyStarStar],
                "one_pg_all" => vec![CheckId::OnePg, CheckId::OnePgReverse],
                "weak" => vec![
                    CheckId::PropertyPTau,
                    CheckId::BgaTheorems,
                    CheckId::WtgaVsTga,
                ],
                "sets" => vec![CheckId::SignUnconditionality, CheckId::Crd, CheckId::Agmin],
                name => match CheckId::ALL.iter().find(|c| c.name() == name) {
                    Some(&c) => vec![c],
                    None => return Err(Error::InvalidParameter(format!("unknown suite {name:?}"))),
                },
            };
            out.extend(ids);
        }
        out.sort();
        out.dedup();
        Ok(Suite(out))
    }
}

/// Runs the suite; reports come back sorted by check id.
pub fn run_suite(ctx: &Context, suite: &Suite) -> Result<Vec<CheckReport>> {
    let mut ids = suite.0.clone();
    ids.sort();
    ids.dedup();
    ids.iter().map(|c| c.run(ctx)).collect()
}

/// True when no report has a non-vacuous violation.
pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_counts_and_bounds() {
        let mut t = Tally::new(Some(2.0));
        t.record(1.0, Some(1.0), || Violation::new(1.0, 1.0, ""));
        t.record(3.0, Some(1.0), || Violation::new(3.0, 1.0, "over"));
        t.record(3.0, None, || unreachable!());
        t.record(3.0, Some(0.0), || unreachable!());
        let r = t.finish("c", "s", BTreeMap::new());
        assert_eq!(r.instances, 4);
        assert_eq!(r.vacuous, 2);
        assert_eq!(r.violation_count, 1);
        assert_eq!(r.max_ratio, Some(3.0));
        assert!(!r.pass);
    }

    #[test]
    fn suite_names() {
        assert_eq!("pg".parse::<Suite>().unwrap().0, vec![CheckId::PgBound]);
        assert_eq!("all".parse::<Suite>().unwrap().0.len(), 16);
        assert!("bogus".parse::<Suite>().is_err());
        let s: Suite = "star,pg,star".parse().unwrap();
        assert_eq!(s.0, vec![CheckId::PgBound, CheckId::PropertyStar]);
        let mut names: Vec<&str> = CheckId::ALL.iter().map(|c| c.name()).collect();
        let sorted = {
            let mut v = names.clone();
            v.sort();
            v
        };
        assert_eq!(names, sorted);
        names.dedup();
        assert_eq!(names.len(), 16);
    }

    #[test]
    fn tau_must_lie_in_unit_interval() {
        let s = SpaceSpec::lp(4, 1.0).unwrap();
        let cfg = VerifyConfig {
            tau: 1.0,
            ..VerifyConfig::default()
        };
        assert!(Context::new(&s, cfg).is_err());
    }
}
