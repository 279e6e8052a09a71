//! Space shorthand and vector literals.
//!
//! Spaces: `lp:<p>` (`p` may be `inf`), `weighted:<w1,...>`, `example:<n>`,
//! `dual(<space>)`, `file:<path>` (TOML or JSON).
//!
//! Vectors: a comma list `1,-2,0.5`, or a `+`-separated sum of terms
//! `e<i>` and `<c>x[<a>..<b>]` (1-based, inclusive), or `file:<path>`
//! holding a JSON array or whitespace/comma separated numbers.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use greedy_bases::SpaceSpec;

/// Dimension used for `lp:<p>` when nothing else fixes it.
pub const DEFAULT_LP_DIM: usize = 6;

pub fn parse_space(s: &str, dim_hint: Option<usize>, cap_dim: usize) -> Result<SpaceSpec> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("dual(").and_then(|r| r.strip_suffix(')')) {
        return Ok(SpaceSpec::dual_of(parse_space(inner, dim_hint, cap_dim)?)?);
    }
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("space {s:?}: expected <kind>:<argument>"))?;
    let space = match kind {
        "lp" => {
            let p = match arg {
                "inf" | "infinity" | "Infinity" => f64::INFINITY,
                _ => arg
                    .parse()
                    .with_context(|| format!("invalid exponent {arg:?}"))?,
            };
            SpaceSpec::lp(dim_hint.unwrap_or(DEFAULT_LP_DIM), p)?
        }
        "weighted" => SpaceSpec::weighted_l1(parse_numbers(arg)?)?,
        "example" => {
            let n = arg
                .parse()
                .with_context(|| format!("invalid example parameter {arg:?}"))?;
            SpaceSpec::example_capped(n, cap_dim)?
        }
        "file" => SpaceSpec::load(Path::new(arg))?,
        _ => bail!("unknown space kind {kind:?}"),
    };
    if space.dim() > cap_dim {
        bail!(
            "space dimension {} exceeds --cap-dim {cap_dim}",
            space.dim()
        );
    }
    Ok(space)
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .with_context(|| format!("invalid number {t:?}"))
        })
        .collect()
}

/// Length of the vector when the literal fixes it by itself.
pub fn literal_dim(s: &str) -> Option<usize> {
    match VectorLiteral::classify(s) {
        VectorLiteral::List(v) => Some(v.len()),
        _ => None,
    }
}

enum VectorLiteral {
    List(Vec<f64>),
    Terms(String),
    Invalid(anyhow::Error),
}

impl VectorLiteral {
    fn classify(s: &str) -> Self {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return match read_vector_file(Path::new(path)) {
                Ok(v) => VectorLiteral::List(v),
                Err(e) => VectorLiteral::Invalid(e),
            };
        }
        if s.contains("x[") || s.starts_with('e') {
            return VectorLiteral::Terms(s.to_string());
        }
        match parse_numbers(s.trim_start_matches('[').trim_end_matches(']')) {
            Ok(v) => VectorLiteral::List(v),
            Err(e) => VectorLiteral::Invalid(e),
        }
    }
}

fn read_vector_file(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(v) = serde_json::from_str::<Vec<f64>>(&text) {
        return Ok(v);
    }
    parse_numbers(&text)
}

pub fn parse_vector(s: &str, dim: usize) -> Result<Vec<f64>> {
    let v = match VectorLiteral::classify(s) {
        VectorLiteral::List(v) => v,
        VectorLiteral::Invalid(e) => return Err(e),
        VectorLiteral::Terms(t) => {
            let mut v = vec![0.0; dim];
            for term in t.split('+').map(str::trim) {
                add_term(&mut v, term)?;
            }
            v
        }
    };
    if v.len() != dim {
        bail!(
            "dimension mismatch: vector has {} entries, space has dimension {dim}",
            v.len()
        );
    }
    if v.is_empty() {
        bail!("empty vector");
    }
    Ok(v)
}

fn one_based(i: &str, dim: usize) -> Result<usize> {
    let i: usize = i
        .trim()
        .parse()
        .with_context(|| format!("invalid index {i:?}"))?;
    if i == 0 || i > dim {
        bail!("index {i} outside 1..={dim}");
    }
    Ok(i - 1)
}

fn add_term(v: &mut [f64], term: &str) -> Result<()> {
    let dim = v.len();
    if let Some(i) = term.strip_prefix('e') {
        v[one_based(i, dim)?] += 1.0;
        return Ok(());
    }
    let (coef, range) = term
        .split_once("x[")
        .ok_or_else(|| anyhow!("invalid vector term {term:?}"))?;
    let c: f64 = if coef.is_empty() {
        1.0
    } else {
        coef.parse()
            .with_context(|| format!("invalid coefficient {coef:?}"))?
    };
    let range = range
        .strip_suffix(']')
        .ok_or_else(|| anyhow!("unterminated range in {term:?}"))?;
    let (a, b) = range
        .split_once("..")
        .ok_or_else(|| anyhow!("range {range:?} must look like a..b"))?;
    let (a, b) = (one_based(a, dim)?, one_based(b, dim)?);
    if a > b {
        bail!("empty range {range:?}");
    }
    for x in &mut v[a..=b] {
        *x += c;
    }
    Ok(())
}
