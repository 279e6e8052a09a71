//! Command-line front end for the `greedy-bases` library.

mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use greedy_bases::constants::{
    conservative_constant, democratic_constant, greedy_type_constant, quasi_greedy_constant,
    reverse_conservative_constant,
};
use greedy_bases::corpus::{generate, CorpusSpec};
use greedy_bases::functionals::{
    dist_indicator, minimize_over_sets, overlap_sets, sigma, sigma_left, sigma_right, sigma_tilde,
    sigma_tilde_left, sigma_tilde_right, Coefficients,
};
use greedy_bases::greedy::{bga, greedy_ordering, tga, wtga};
use greedy_bases::space::basis_constant;
use greedy_bases::verify::{all_pass, run_suite, Context, Suite, VerifyConfig};
use greedy_bases::{
    BranchRule, BranchSelectorSpec, ErrorValue, Functional, GreedyKind, NormedSpace, Side,
    SpaceSpec, Vector, WeakPolicy,
};

#[derive(Parser)]
#[command(
    name = "greedy-bases",
    version,
    about = "Greedy approximation in finite-dimensional normed spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm (and optionally dual norm with its LP witness) of a vector.
    Norm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vec: String,
        /// Also report the dual norm and a norming functional.
        #[arg(long)]
        dual: bool,
    },
    /// Run TGA, WTGA or BGA on a vector.
    Greedy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vec: String,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "tga")]
        algo: Algo,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, value_enum, default_value = "greedy")]
        policy: Policy,
        #[arg(long, value_enum, default_value = "smallest-index")]
        selector: Selector,
    },
    /// Democracy-type constants of a space, optionally greedy-type
    /// constants over a corpus.
    Constants {
        #[command(flatten)]
        common: Common,
        /// Also estimate the greedy-type constants over a corpus.
        #[arg(long)]
        greedy: bool,
        #[arg(long, default_value_t = 200)]
        corpus: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Every best m-term error functional at (x, m).
    Errors {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vec: String,
        #[arg(long)]
        m: usize,
        /// Overlap fraction for the error against sets meeting the greedy
        /// set in at most ⌊λm⌋ indices.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run a verification suite; exits 1 when any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, value_enum, default_value = "smallest-index")]
        selector: Selector,
        /// Corpus size.
        #[arg(long, default_value_t = 1000)]
        corpus: usize,
        /// Corpus size for the checks that enumerate many competitors.
        #[arg(long, default_value_t = 100)]
        heavy_corpus: usize,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    space: Option<String>,
    /// Dimension for `lp:<p>` spaces.
    #[arg(long)]
    dim: Option<usize>,
    /// Largest admissible space dimension.
    #[arg(long, default_value_t = 24)]
    cap_dim: usize,
    /// Largest subset size enumerated by the constants.
    #[arg(long)]
    cap_subset: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Tga,
    Wtga,
    Bga,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Greedy,
    Lazy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selector {
    SmallestIndex,
    LargestCoefficient,
    LargestIndex,
}

impl From<Policy> for WeakPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Greedy => WeakPolicy::Greedy,
            Policy::Lazy => WeakPolicy::Lazy,
        }
    }
}

impl From<Selector> for BranchRule {
    fn from(s: Selector) -> Self {
        match s {
            Selector::SmallestIndex => BranchRule::SmallestIndex,
            Selector::LargestCoefficient => BranchRule::LargestCoefficient,
            Selector::LargestIndex => BranchRule::LargestIndex,
        }
    }
}

/// A table: JSON-lines records, or CSV with the given columns.
struct Output {
    columns: Vec<&'static str>,
    records: Vec<Value>,
}

impl Output {
    fn single(columns: Vec<&'static str>, record: Value) -> Self {
        Self {
            columns,
            records: vec![record],
        }
    }

    fn render(&self, format: Format) -> Result<String> {
        let mut out = String::new();
        match format {
            Format::Json => {
                for r in &self.records {
                    out.push_str(&serde_json::to_string(r)?);
                    out.push('\n');
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for r in &self.records {
                    w.write_record(self.columns.iter().map(|c| csv_cell(&r[*c])))?;
                }
                out = String::from_utf8(w.into_inner()?)?;
            }
        }
        Ok(out)
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

impl Common {
    fn space(&self, vec: Option<&str>) -> Result<SpaceSpec> {
        let Some(spec) = &self.space else {
            bail!("--space is required");
        };
        let hint = self.dim.or_else(|| vec.and_then(parse::literal_dim));
        parse::parse_space(spec, hint, self.cap_dim)
    }

    fn size_cap(&self, space: &SpaceSpec) -> usize {
        self.cap_subset
            .unwrap_or(space.dim().min(12))
            .min(space.dim())
    }

    fn emit(&self, output: &Output) -> Result<()> {
        let text = output.render(self.format)?;
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn vector(space: &SpaceSpec, literal: &str) -> Result<Vector> {
    Ok(Vector::new(parse::parse_vector(literal, space.dim())?)?)
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

fn cmd_norm(common: &Common, vec: &str, dual: bool) -> Result<Output> {
    let space = common.space(Some(vec))?;
    let x = vector(&space, vec)?;
    let mut record = json!({
        "space": space.to_string(),
        "vector": x,
        "norm": space.norm(&x)?,
    });
    if dual {
        let (value, witness) = space.dual_norm_with_witness(&x)?;
        record["dual_norm"] = json!(value);
        record["dual_witness"] = to_value(&witness)?;
    }
    Ok(Output::single(vec!["space", "norm", "dual_norm"], record))
}

fn cmd_greedy(
    common: &Common,
    vec: &str,
    m: usize,
    algo: Algo,
    tau: f64,
    policy: Policy,
    selector: Selector,
) -> Result<Output> {
    let space = match common.space {
        Some(_) => Some(common.space(Some(vec))?),
        None => None,
    };
    let x = match &space {
        Some(space) => vector(space, vec)?,
        None => {
            let Some(dim) = common.dim.or_else(|| parse::literal_dim(vec)) else {
                bail!("without --space, give --dim or a comma-list vector");
            };
            Vector::new(parse::parse_vector(vec, dim)?)?
        }
    };
    let mut record = json!({ "space": space.as_ref().map(|s| s.to_string()), "m": m });
    let approx = match algo {
        Algo::Tga => {
            let sel = greedy_ordering(&x).at(m)?;
            record["algo"] = json!("tga");
            record["selection"] = to_value(&sel.lambda())?;
            tga(&x, m)?
        }
        Algo::Wtga => {
            let (sel, approx) = wtga(&x, m, tau, policy.into())?;
            record["algo"] = json!("wtga");
            record["tau"] = json!(tau);
            record["policy"] = to_value(&sel.policy)?;
            record["selection"] = to_value(&sel.indices)?;
            record["steps"] = json!(one_based(&sel.steps));
            record["thresholds"] = json!(sel.thresholds);
            approx
        }
        Algo::Bga => {
            let spec = BranchSelectorSpec::new(tau, selector.into())?;
            let run = bga(&x, m, &spec)?;
            record["algo"] = json!("bga");
            record["tau"] = json!(tau);
            record["selector"] = to_value(&spec.rule)?;
            record["selection"] = to_value(&run.indices)?;
            let steps: Vec<usize> = run.steps.iter().map(|s| s.index).collect();
            record["steps"] = json!(one_based(&steps));
            record["thresholds"] = json!(run.steps.iter().map(|s| s.threshold).collect::<Vec<_>>());
            run.approx
        }
    };
    let residual = x.sub(&approx);
    record["approx"] = to_value(&approx)?;
    record["residual_norm"] = json!(space.as_ref().map(|s| s.norm_of(&residual)));
    record["residual"] = to_value(&residual)?;
    Ok(Output::single(
        vec!["algo", "m", "selection", "residual_norm"],
        record,
    ))
}

fn cmd_constants(common: &Common, greedy: bool, corpus_size: usize, seed: u64) -> Result<Output> {
    let space = common.space(None)?;
    let cap = common.size_cap(&space);
    let corpus = generate(&CorpusSpec::new(space.dim(), corpus_size, seed));
    let mut estimates = vec![
        quasi_greedy_constant(&space, &corpus)?,
        basis_constant(&space, corpus_size, seed),
        democratic_constant(&space, cap)?,
        conservative_constant(&space, cap)?,
        reverse_conservative_constant(&space, cap)?,
    ];
    if greedy {
        for kind in GreedyKind::ALL {
            estimates.push(greedy_type_constant(&space, kind, &corpus)?);
        }
    }
    let records = estimates
        .iter()
        .map(|e| {
            let mut v = to_value(e)?;
            v["space"] = json!(space.to_string());
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output {
        columns: vec!["space", "kind", "value", "exactness"],
        records,
    })
}

fn error_record(name: &str, e: &ErrorValue) -> Result<Value> {
    let mut v = to_value(e)?;
    v["functional"] = json!(name);
    if e.is_infeasible() {
        v["value"] = json!("INFEASIBLE");
    }
    Ok(v)
}

fn cmd_errors(common: &Common, vec: &str, m: usize, lambda: Option<f64>) -> Result<Output> {
    let space = common.space(Some(vec))?;
    let x = vector(&space, vec)?;
    let mut rows: Vec<(String, ErrorValue)> = vec![
        ("sigma".into(), sigma(&space, &x, m)?),
        ("sigma_tilde".into(), sigma_tilde(&space, &x, m)?),
        ("sigma_L".into(), sigma_left(&space, &x, m)?),
        ("sigma_R".into(), sigma_right(&space, &x, m)?),
        ("sigma_tilde_L".into(), sigma_tilde_left(&space, &x, m)?),
        ("sigma_tilde_R".into(), sigma_tilde_right(&space, &x, m)?),
    ];
    for (name, side) in [
        ("dist_indicator", Side::Unconstrained),
        ("dist_indicator_L", Side::Left),
        ("dist_indicator_R", Side::Right),
        ("dist_indicator_LR", Side::Both),
    ] {
        rows.push((name.into(), dist_indicator(&space, &x, m, side)?));
    }
    if let Some(lambda) = lambda {
        if !(0.0..=1.0).contains(&lambda) {
            bail!("--lambda = {lambda} must lie in [0, 1]");
        }
        let greedy_set = greedy_ordering(&x).at(m)?.lambda();
        let budget = (lambda * m as f64).floor() as usize;
        let sets = overlap_sets(space.dim(), &greedy_set, budget, m, space.is_absolute());
        let e = minimize_over_sets(
            &space,
            x.coeffs(),
            sets,
            Coefficients::Free,
            Functional::Sigma,
        );
        rows.push((format!("sigma_overlap(lambda={lambda})"), e));
    }
    let records = rows
        .iter()
        .map(|(name, e)| error_record(name, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(Output {
        columns: vec!["functional", "value", "witness_set"],
        records,
    })
}

fn cmd_verify(
    common: &Common,
    suite: &str,
    seed: u64,
    tau: f64,
    selector: Selector,
    corpus: usize,
    heavy_corpus: usize,
) -> Result<(Output, bool)> {
    let suite: Suite = suite.parse()?;
    let space = common.space(None)?;
    let config = VerifyConfig {
        seed,
        corpus_size: corpus,
        size_cap: common.cap_subset,
        heavy_corpus_size: heavy_corpus,
        tau,
        selector: selector.into(),
        ..VerifyConfig::default()
    };
    let ctx = Context::new(&space, config)?;
    let reports = run_suite(&ctx, &suite)?;
    let pass = all_pass(&reports);
    let records = reports
        .iter()
        .map(|r| {
            let mut v = to_value(r)?;
            // CSV reports the total count under `violations`.
            if matches!(common.format, Format::Csv) {
                v["violations"] = json!(r.violation_count);
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let output = Output {
        columns: vec![
            "check",
            "instances",
            "max_ratio",
            "bound",
            "violations",
            "vacuous",
        ],
        records,
    };
    Ok((output, pass))
}

fn run(cli: Cli) -> Result<bool> {
    let (common, output, pass) = match &cli.command {
        Command::Norm { common, vec, dual } => (common, cmd_norm(common, vec, *dual)?, true),
        Command::Greedy {
            common,
            vec,
            m,
            algo,
            tau,
            policy,
            selector,
        } => (
            common,
            cmd_greedy(common, vec, *m, *algo, *tau, *policy, *selector)?,
            true,
        ),
        Command::Constants {
            common,
            greedy,
            corpus,
            seed,
        } => (
            common,
            cmd_constants(common, *greedy, *corpus, *seed)?,
            true,
        ),
        Command::Errors {
            common,
            vec,
            m,
            lambda,
        } => (common, cmd_errors(common, vec, *m, *lambda)?, true),
        Command::Verify {
            common,
            suite,
            seed,
            tau,
            selector,
            corpus,
            heavy_corpus,
        } => {
            let (output, pass) = cmd_verify(
                common,
                suite,
                *seed,
                *tau,
                *selector,
                *corpus,
                *heavy_corpus,
            )?;
            (common, output, pass)
        }
    };
    common.emit(&output)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
