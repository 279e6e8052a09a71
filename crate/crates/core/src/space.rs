//! Finite-dimensional normed spaces with a fixed canonical basis.
//!
//! Every concrete [`SpaceSpec`] norm is absolute (it depends only on the
//! moduli of the coefficients), so the canonical basis is 1-unconditional.
//! Arbitrary norms plug into the rest of the crate through [`NormedSpace`].

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{Budget, ConstWitness, ConstantEstimate, Exactness};
use crate::error::{Error, Result};
use crate::lp;
use crate::vector::{IndexSet, Vector};

/// Default cap on the dimension of spaces built by enumeration.
pub const DEFAULT_DIM_CAP: usize = 24;

/// A norm on `R^d` expressed in coordinates of the canonical basis.
pub trait NormedSpace: Sync {
    fn dim(&self) -> usize;

    /// Evaluates the norm. `coeffs.len()` must equal `dim()`.
    fn eval(&self, coeffs: &[f64]) -> f64;

    /// True when the norm depends only on `|x_i|` and is monotone in each
    /// of them. Coordinate projections are then contractions.
    fn is_absolute(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        format!("custom(d={})", self.dim())
    }

    fn norm_of(&self, x: &Vector) -> f64 {
        self.eval(x.coeffs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    /// `‖x‖_p`, `1 ≤ p ≤ ∞`.
    Lp { p: f64 },
    /// `Σ w_i |x_i|`.
    WeightedL1 { weights: Vec<f64> },
    /// `max_{A ∈ family} Σ_{i∈A} |x_i|`.
    PolyhedralAbs { family: Vec<IndexSet> },
    /// The Example space: polyhedral, family `∪_{m ≤ n} {A ⊆ [m!, 2·n!] : |A| ≤ m!}`.
    Example { n: u32 },
    /// Dual norm of the inner space.
    DualOf { inner: Box<SpaceSpec> },
}

#[derive(Clone, Debug)]
enum Kernel {
    Lp(f64),
    Weighted(Vec<f64>),
    /// `max |x_i| / w_i`, the dual of weighted ℓ1.
    WeightedMax(Vec<f64>),
    Rows(Arc<Vec<Vec<usize>>>),
    /// Dual of a polyhedral absolute norm, evaluated by LP.
    DualRows(Arc<Vec<Vec<usize>>>),
}

#[derive(Clone, Debug)]
pub struct SpaceSpec {
    dim: usize,
    norm: NormSpec,
    kernel: Kernel,
}

impl PartialEq for SpaceSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.norm == other.norm
    }
}

impl SpaceSpec {
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        check_dim(dim)?;
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "p = {p} must satisfy p >= 1"
            )));
        }
        Ok(Self {
            dim,
            norm: NormSpec::Lp { p },
            kernel: Kernel::Lp(p),
        })
    }

    pub fn weighted_l1(weights: Vec<f64>) -> Result<Self> {
        check_dim(weights.len())?;
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be positive and finite".into(),
            ));
        }
        Ok(Self {
            dim: weights.len(),
            kernel: Kernel::Weighted(weights.clone()),
            norm: NormSpec::WeightedL1 { weights },
        })
    }

    /// Polyhedral absolute norm. Missing singletons are added so the result
    /// is a norm rather than a seminorm.
    pub fn polyhedral_abs(dim: usize, family: Vec<IndexSet>) -> Result<Self> {
        check_dim(dim)?;
        if family.is_empty() {
            return Err(Error::InvalidParameter(
                "polyhedral family must be nonempty".into(),
            ));
        }
        if let Some(bad) = family
            .iter()
            .find(|a| a.is_empty() || a.last().unwrap() >= dim)
        {
            return Err(Error::InvalidParameter(format!(
                "family member {bad} is empty or exceeds dimension {dim}"
            )));
        }
        let mut family = family;
        let mut covered = vec![false; dim];
        for a in &family {
            if a.len() == 1 {
                covered[a.as_slice()[0]] = true;
            }
        }
        for (i, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
            family.push(IndexSet::new(vec![i]));
        }
        let rows = family.iter().map(|a| a.as_slice().to_vec()).collect();
        Ok(Self {
            dim,
            norm: NormSpec::PolyhedralAbs { family },
            kernel: Kernel::Rows(Arc::new(rows)),
        })
    }

    /// The Example space for parameter `n`, dimension `2·n!`.
    pub fn example(n: u32) -> Result<Self> {
        Self::example_capped(n, DEFAULT_DIM_CAP)
    }

    pub fn example_capped(n: u32, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "example space needs n >= 2, got {n}"
            )));
        }
        let dim = (1..=n as usize)
            .try_fold(1usize, |acc, k| acc.checked_mul(k))
            .and_then(|f| f.checked_mul(2))
            .unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::CapExceeded {
                what: "example space dimension",
                value: dim,
                cap,
            });
        }
        let rows = Arc::new(example_rows(n, dim));
        Ok(Self {
            dim,
            norm: NormSpec::Example { n },
            kernel: Kernel::Rows(rows),
        })
    }

    /// The dual space of `inner`. Only one level of duality is supported.
    pub fn dual_of(inner: SpaceSpec) -> Result<Self> {
        let dim = inner.dim;
        let kernel = match &inner.kernel {
            Kernel::Lp(p) => Kernel::Lp(conjugate_exponent(*p)),
            Kernel::Weighted(w) => Kernel::WeightedMax(w.clone()),
            Kernel::WeightedMax(w) => Kernel::Weighted(w.clone()),
            Kernel::Rows(rows) => Kernel::DualRows(rows.clone()),
            Kernel::DualRows(_) => {
                return Err(Error::UnsupportedNorm("dual of a dual space".into()));
            }
        };
        if matches!(inner.norm, NormSpec::DualOf { .. }) {
            return Err(Error::UnsupportedNorm("dual of a dual space".into()));
        }
        Ok(Self {
            dim,
            norm: NormSpec::DualOf {
                inner: Box::new(inner),
            },
            kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm
    }

    /// Rows of the polyhedral description (0-based), if the norm is polyhedral.
    pub fn family_rows(&self) -> Option<&[Vec<usize>]> {
        match &self.kernel {
            Kernel::Rows(r) => Some(r),
            _ => None,
        }
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        self.check(x)?;
        Ok(self.eval(x.coeffs()))
    }

    /// `max{ Σ f_i x_i : ‖x‖ ≤ 1 }`.
    pub fn dual_norm(&self, f: &Vector) -> Result<f64> {
        self.dual_norm_with_witness(f).map(|(v, _)| v)
    }

    /// The dual norm together with a maximizer `x` on the unit sphere.
    pub fn dual_norm_with_witness(&self, f: &Vector) -> Result<(f64, Vector)> {
        self.check(f)?;
        match &self.norm {
            NormSpec::Lp { p } => Ok(lp_dual_with_witness(f, *p)),
            NormSpec::WeightedL1 { weights } => {
                let (k, v) = f
                    .coeffs()
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| c.abs() / w)
                    .enumerate()
                    .fold(
                        (0, 0.0),
                        |best, (i, v)| if v > best.1 { (i, v) } else { best },
                    );
                let x = Vector::unit(self.dim, k).scale(f.get(k).signum() / weights[k]);
                Ok((v, x))
            }
            NormSpec::PolyhedralAbs { .. } | NormSpec::Example { .. } => {
                let Kernel::Rows(rows) = &self.kernel else {
                    unreachable!("polyhedral spaces carry row kernels")
                };
                polyhedral_dual(rows, f.coeffs())
            }
            NormSpec::DualOf { .. } => Err(Error::UnsupportedNorm(
                "dual norm of a dual space (bidual) is not supported".into(),
            )),
        }
    }

    fn check(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&SpaceFile::from(self)).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let file: SpaceFile = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&SpaceFile::from(self))
            .map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SpaceFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(file)
    }

    /// Writes the space file; `.json` selects JSON, anything else TOML.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = if is_json(path) {
            self.to_json()?
        } else {
            self.to_toml()?
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if is_json(path) {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()) == Some("json")
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(())
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn example_rows(n: u32, dim: usize) -> Vec<Vec<usize>> {
    let mut rows = Vec::new();
    let mut fact = 1usize;
    for m in 1..=n as usize {
        fact *= m;
        // F_m: subsets of size ≤ m! whose elements are all ≥ m! (1-based).
        if fact > dim {
            break;
        }
        let pool: Vec<usize> = (fact - 1..dim).collect();
        let size = fact.min(pool.len());
        // Only maximal members are stored; the norm max dominates subsets.
        rows.extend(pool.into_iter().combinations(size));
    }
    rows
}

fn lp_eval(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|c| c.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|c| c * c).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        x.iter().fold(0.0, |m, c| m.max(c.abs()))
    } else {
        let scale = x.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale
            * x.iter()
                .map(|c| (c.abs() / scale).powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
    }
}

fn lp_dual_with_witness(f: &Vector, p: f64) -> (f64, Vector) {
    let q = conjugate_exponent(p);
    let value = lp_eval(f.coeffs(), q);
    let d = f.dim();
    if value == 0.0 {
        return (0.0, Vector::unit(d, 0));
    }
    let x: Vec<f64> = if p.is_infinite() {
        f.coeffs()
            .iter()
            .map(|c| c.signum() * (c.abs() > 0.0) as u8 as f64)
            .collect()
    } else if p == 1.0 {
        let k = (0..d)
            .max_by(|&i, &j| f.get(i).abs().total_cmp(&f.get(j).abs()).then(j.cmp(&i)))
            .unwrap();
        let mut v = vec![0.0; d];
        v[k] = f.get(k).signum();
        v
    } else {
        // x_i = sign(f_i) |f_i|^{q-1} / ‖f‖_q^{q-1}
        f.coeffs()
            .iter()
            .map(|c| c.signum() * (c.abs() / value).powf(q - 1.0))
            .collect()
    };
    (value, Vector::new(x).expect("finite witness"))
}

/// Dual of `max_rows Σ_{i∈row} |x_i|` at `f`.
///
/// The unit ball is `{x : Σ_{i∈row} |x_i| ≤ 1 for every row}`. By the sign
/// symmetry of the ball the optimum puts `x_i = sign(f_i) y_i` with `y ≥ 0`,
/// which folds the positive/negative split into a packing LP over `|f|`.
/// Coordinates with `f_i = 0` are dropped; setting them to zero is optimal.
fn polyhedral_dual(rows: &[Vec<usize>], f: &[f64]) -> Result<(f64, Vector)> {
    let support: Vec<usize> = (0..f.len()).filter(|&i| f[i] != 0.0).collect();
    let d = f.len();
    if support.is_empty() {
        return Ok((0.0, Vector::unit(d, 0)));
    }
    let mut pos = vec![usize::MAX; d];
    for (k, &i) in support.iter().enumerate() {
        pos[i] = k;
    }
    let mut seen = HashSet::new();
    let mut a = Vec::new();
    for row in rows {
        let restricted: Vec<usize> = row
            .iter()
            .filter(|&&i| pos[i] != usize::MAX)
            .map(|&i| pos[i])
            .collect();
        if !restricted.is_empty() && seen.insert(restricted.clone()) {
            let mut r = vec![0.0; support.len()];
            for k in restricted {
                r[k] = 1.0;
            }
            a.push(r);
        }
    }
    let c: Vec<f64> = support.iter().map(|&i| f[i].abs()).collect();
    let b = vec![1.0; a.len()];
    let sol = lp::maximize(&c, &a, &b)?;
    let mut x = vec![0.0; d];
    for (k, &i) in support.iter().enumerate() {
        x[i] = f[i].signum() * sol.point[k].max(0.0);
    }
    Ok((sol.objective, Vector::new(x)?))
}

fn rows_eval(rows: &[Vec<usize>], x: &[f64]) -> f64 {
    rows.iter()
        .map(|r| r.iter().map(|&i| x[i].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl NormedSpace for SpaceSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kernel {
            Kernel::Lp(p) => lp_eval(x, *p),
            Kernel::WeightedMax(w) => x.iter().zip(w).fold(0.0, |m, (c, wi)| m.max(c.abs() / wi)),
            Kernel::Weighted(w) => x.iter().zip(w).map(|(c, wi)| c.abs() * wi).sum(),
            Kernel::Rows(rows) => rows_eval(rows, x),
            Kernel::DualRows(rows) => polyhedral_dual(rows, x)
                .map(|(v, _)| v)
                .expect("packing LP with unit right-hand side is feasible and bounded"),
        }
    }

    fn is_absolute(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.norm {
            NormSpec::Lp { p } if p.is_infinite() => write!(f, "lp:inf"),
            NormSpec::Lp { p } => write!(f, "lp:{p}"),
            NormSpec::WeightedL1 { weights } => {
                write!(
                    f,
                    "weighted:{}",
                    weights.iter().map(|w| w.to_string()).join(",")
                )
            }
            NormSpec::PolyhedralAbs { family } => {
                write!(f, "polyhedral(d={},rows={})", self.dim, family.len())
            }
            NormSpec::Example { n } => write!(f, "example:{n}"),
            NormSpec::DualOf { inner } => write!(f, "dual({inner})"),
        }
    }
}

/// Basis constant `K_b = max_m ‖P_{[1,m]}‖`.
///
/// Exact (= 1) for absolute norms. Otherwise a lower bound from seeded
/// random vectors plus the unit vectors.
pub fn basis_constant<N: NormedSpace>(space: &N, samples: usize, seed: u64) -> ConstantEstimate {
    let d = space.dim();
    let budget = Budget {
        size_cap: None,
        corpus: Some(samples),
        seed: Some(seed),
    };
    if space.is_absolute() {
        return ConstantEstimate {
            kind: "basis_constant".into(),
            value: 1.0,
            exactness: Exactness::Exact,
            witness: None,
            budget,
            skipped: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 1.0;
    let mut witness = None;
    let mut probe = |x: Vec<f64>| {
        let nx = space.eval(&x);
        if nx <= 0.0 {
            return;
        }
        let mut head = vec![0.0; d];
        for m in 0..d {
            head[m] = x[m];
            let r = space.eval(&head) / nx;
            if r > best {
                best = r;
                witness = Some(ConstWitness::Vector {
                    x: x.clone(),
                    m: m + 1,
                    set: None,
                });
            }
        }
    };
    for i in 0..d {
        probe(Vector::unit(d, i).into_inner());
    }
    for _ in 0..samples {
        probe((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    ConstantEstimate {
        kind: "basis_constant".into(),
        value: best,
        exactness: Exactness::LowerBound,
        witness,
        budget,
        skipped: 0,
    }
}

// ---------------------------------------------------------------------------
// Space-spec file format

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    dim: usize,
    norm: NormFile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NormFile {
    Lp {
        #[serde(with = "exponent")]
        p: f64,
    },
    WeightedL1 {
        weights: Vec<f64>,
    },
    PolyhedralAbs {
        family: Vec<Vec<usize>>,
    },
    DualOf {
        inner: Box<SpaceFile>,
    },
    Example {
        n: u32,
    },
}

/// `p = ∞` is written as the string `"inf"` since JSON has no infinity.
mod exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Number(p) => Ok(p),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(f64::INFINITY)
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid exponent {t:?}"))),
        }
    }
}

impl From<&SpaceSpec> for SpaceFile {
    fn from(s: &SpaceSpec) -> Self {
        let norm = match &s.norm {
            NormSpec::Lp { p } => NormFile::Lp { p: *p },
            NormSpec::WeightedL1 { weights } => NormFile::WeightedL1 {
                weights: weights.clone(),
            },
            NormSpec::PolyhedralAbs { family } => NormFile::PolyhedralAbs {
                family: family.iter().map(|a| a.to_one_based()).collect(),
            },
            NormSpec::Example { n } => NormFile::Example { n: *n },
            NormSpec::DualOf { inner } => NormFile::DualOf {
                inner: Box::new(SpaceFile::from(inner.as_ref())),
            },
        };
        SpaceFile { dim: s.dim, norm }
    }
}

impl TryFrom<SpaceFile> for SpaceSpec {
    type Error = Error;

    fn try_from(f: SpaceFile) -> Result<Self> {
        let space = match f.norm {
            NormFile::Lp { p } => SpaceSpec::lp(f.dim, p)?,
            NormFile::WeightedL1 { weights } => SpaceSpec::weighted_l1(weights)?,
            NormFile::PolyhedralAbs { family } => {
                let family = family
                    .iter()
                    .map(|a| IndexSet::one_based(a))
                    .collect::<Result<Vec<_>>>()?;
                SpaceSpec::polyhedral_abs(f.dim, family)?
            }
            NormFile::Example { n } => SpaceSpec::example(n)?,
            NormFile::DualOf { inner } => {
                let inner = SpaceSpec::try_from(*inner)?;
                if matches!(inner.norm, NormSpec::DualOf { .. }) {
                    return Err(Error::UnsupportedNorm(
                        "DualOf nesting depth exceeds 1".into(),
                    ));
                }
                SpaceSpec::dual_of(inner)?
            }
        };
        if space.dim != f.dim {
            return Err(Error::DimensionMismatch {
                expected: f.dim,
                found: space.dim,
            });
        }
        Ok(space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(d: usize, lo: usize, hi: usize) -> Vector {
        // 1-based inclusive range
        Vector::indicator(d, &IndexSet::range(lo - 1, hi))
    }

    #[test]
    fn example_norm_values() {
        let s = SpaceSpec::example(3).unwrap();
        assert_eq!(s.dim(), 12);
        assert_eq!(s.norm(&ind(12, 1, 6)).unwrap(), 2.0);
        assert_eq!(s.norm(&ind(12, 7, 12)).unwrap(), 6.0);
        assert_eq!(s.norm(&ind(12, 6, 11)).unwrap(), 6.0);
        assert_eq!(s.norm(&Vector::unit(12, 0)).unwrap(), 1.0);
    }

    #[test]
    fn example_two_family() {
        let s = SpaceSpec::example(2).unwrap();
        assert_eq!(s.dim(), 4);
        let rows = s.family_rows().unwrap();
        for pair in [[1, 2], [1, 3], [2, 3]] {
            assert!(rows.iter().any(|r| r == &pair.to_vec()));
        }
        for i in 0..4 {
            assert!(rows.iter().any(|r| r == &vec![i]));
        }
        assert_eq!(rows.len(), 7);
    }

    #[test]
    fn example_cap() {
        assert!(matches!(
            SpaceSpec::example(4),
            Err(Error::CapExceeded { .. })
        ));
        assert!(SpaceSpec::example_capped(4, 48).is_ok());
        assert!(SpaceSpec::example(1).is_err());
    }

    #[test]
    fn lp_values() {
        let s = SpaceSpec::lp(3, 2.0).unwrap();
        assert_eq!(s.norm(&Vector::unit(3, 0)).unwrap(), 1.0);
        assert_eq!(s.dual_norm(&Vector::unit(3, 0)).unwrap(), 1.0);
        let s3 = SpaceSpec::lp(2, 3.0).unwrap();
        let x = Vector::new(vec![1.0, 1.0]).unwrap();
        assert!((s3.norm(&x).unwrap() - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!(SpaceSpec::lp(2, 0.5).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let s = SpaceSpec::lp(3, 1.0).unwrap();
        assert!(matches!(
            s.norm(&Vector::unit(2, 0)),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn example_dual_values() {
        let s = SpaceSpec::example(3).unwrap();
        assert!((s.dual_norm(&ind(12, 7, 12)).unwrap() - 1.0).abs() < 1e-12);
        // Frozen from an independent LP solve: 1 + 5/2.
        assert!((s.dual_norm(&ind(12, 1, 6)).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn dual_witness_attains() {
        let s = SpaceSpec::example(3).unwrap();
        let f = Vector::new((0..12).map(|i| (i as f64 - 5.5) * 0.3).collect()).unwrap();
        let (v, x) = s.dual_norm_with_witness(&f).unwrap();
        assert!((s.norm(&x).unwrap() - 1.0).abs() < 1e-9);
        assert!((f.dot(&x) - v).abs() < 1e-9);
    }

    #[test]
    fn dual_space_norm_matches_dual_norm() {
        let inner = SpaceSpec::example(2).unwrap();
        let dual = SpaceSpec::dual_of(inner.clone()).unwrap();
        let f = Vector::new(vec![1.0, -2.0, 0.5, 0.0]).unwrap();
        assert_eq!(dual.norm(&f).unwrap(), inner.dual_norm(&f).unwrap());
        assert!(dual.dual_norm(&f).is_err());
        assert!(SpaceSpec::dual_of(dual).is_err());
    }

    #[test]
    fn dual_of_weighted_is_weighted_max() {
        let w = SpaceSpec::weighted_l1(vec![1.0, 2.0, 4.0]).unwrap();
        let d = SpaceSpec::dual_of(w.clone()).unwrap();
        let f = Vector::new(vec![1.0, 4.0, 4.0]).unwrap();
        assert_eq!(d.norm(&f).unwrap(), 2.0);
        assert_eq!(w.dual_norm(&f).unwrap(), 2.0);
        let dl1 = SpaceSpec::dual_of(SpaceSpec::lp(3, 1.0).unwrap()).unwrap();
        assert_eq!(dl1.norm(&f).unwrap(), 4.0);
    }

    #[test]
    fn polyhedral_adds_singletons() {
        let s = SpaceSpec::polyhedral_abs(3, vec![IndexSet::new(vec![0, 1])]).unwrap();
        assert_eq!(s.family_rows().unwrap().len(), 4);
        assert_eq!(s.norm(&Vector::unit(3, 2)).unwrap(), 1.0);
        assert!(SpaceSpec::polyhedral_abs(3, vec![]).is_err());
        assert!(SpaceSpec::polyhedral_abs(3, vec![IndexSet::new(vec![5])]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let spaces = vec![
            SpaceSpec::lp(4, f64::INFINITY).unwrap(),
            SpaceSpec::lp(4, 1.5).unwrap(),
            SpaceSpec::weighted_l1(vec![1.0, 0.1, 3.0]).unwrap(),
            SpaceSpec::polyhedral_abs(3, vec![IndexSet::new(vec![0, 2])]).unwrap(),
            SpaceSpec::example(3).unwrap(),
            SpaceSpec::dual_of(SpaceSpec::example(2).unwrap()).unwrap(),
        ];
        for s in spaces {
            let t = SpaceSpec::from_toml(&s.to_toml().unwrap()).unwrap();
            assert_eq!(t, s, "toml {s}");
            let j = SpaceSpec::from_json(&s.to_json().unwrap()).unwrap();
            assert_eq!(j, s, "json {s}");
        }
    }

    #[test]
    fn file_rejects_nested_dual_and_bad_dim() {
        let nested = "dim = 4\n[norm]\nkind = \"dual_of\"\n[norm.inner]\ndim = 4\n[norm.inner.norm]\nkind = \"dual_of\"\n[norm.inner.norm.inner]\ndim = 4\n[norm.inner.norm.inner.norm]\nkind = \"lp\"\np = 2.0\n";
        assert!(SpaceSpec::from_toml(nested).is_err());
        let bad = "dim = 5\n[norm]\nkind = \"example\"\nn = 2\n";
        assert!(SpaceSpec::from_toml(bad).is_err());
    }

    #[test]
    fn basis_constant_absolute_is_exact_one() {
        let est = basis_constant(&SpaceSpec::lp(5, 1.0).unwrap(), 10, 1);
        assert_eq!(est.value, 1.0);
        assert_eq!(est.exactness, Exactness::Exact);
        let est = basis_constant(&SpaceSpec::example(3).unwrap(), 10, 1);
        assert_eq!(est.value, 1.0);
    }
}
