use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filtration::{Filtration, FiltrationSpec};
use crate::kfunc::{Couple, Method};
use crate::norms::SymmetricSpace;
use crate::orlicz::{OrliczFunction, OrliczSpec};
use crate::tolerance::Tolerances;

/// An exponent in `(0, ∞]`. Serialized as a number, or as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INF),
            t => t
                .parse::<f64>()
                .map(Exponent)
                .map_err(|_| Error::Config(format!("not an exponent: {s:?}"))),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn exps(v: &[f64]) -> Vec<Exponent> {
    v.iter().copied().map(Exponent).collect()
}

/// How the filtration of each instance is built.
///
/// Shorthand strings: `2x2x2` or `tensor:2x2x2`, `dyadic:16`, `comb:8`, and
/// `partition:DxN` for a random refining chain of `N` partitions of `D`
/// points drawn per instance. Explicit filtrations are written as objects.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Fixed(FiltrationSpec),
    RandomPartition { dim: usize, levels: usize },
}

impl Shape {
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Filtration> {
        match self {
            Shape::Fixed(spec) => spec.build(),
            Shape::RandomPartition { dim, levels } => Filtration::partition(random_chain(*dim, *levels, rng)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Fixed(FiltrationSpec::Tensor { factors }) => factors.iter().product(),
            Shape::Fixed(FiltrationSpec::Partition { partitions }) => partitions.first().map_or(0, Vec::len),
            Shape::Fixed(FiltrationSpec::Dyadic { dim } | FiltrationSpec::Comb { dim }) => *dim,
            Shape::RandomPartition { dim, .. } => *dim,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Shape::Fixed(spec) => spec.build().map(|_| ()),
            Shape::RandomPartition { dim, levels } => {
                if *dim == 0 || *levels == 0 {
                    return Err(Error::Config(format!("bad partition shape {self}")));
                }
                Ok(())
            }
        }
    }
}

/// Level 1 splits the shuffled points once, each later level splits every
/// block of two or more points with probability 0.7, and the last level is
/// all singletons.
pub fn random_chain<R: Rng + ?Sized>(dim: usize, levels: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    // blocks as ranges into `order`
    let mut cuts: Vec<usize> = vec![0, dim];
    let mut chain = Vec::with_capacity(levels);
    for n in 1..levels {
        let mut next = vec![0];
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a >= 2 && (n == 1 || rng.random::<f64>() < 0.7) {
                next.push(rng.random_range(a + 1..b));
            }
            next.push(b);
        }
        cuts = next;
        let mut labels = vec![0; dim];
        for (k, w) in cuts.windows(2).enumerate() {
            for &i in &order[w[0]..w[1]] {
                labels[i] = k;
            }
        }
        chain.push(labels);
    }
    chain.push((0..dim).collect());
    chain
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Fixed(FiltrationSpec::Tensor { factors }) => {
                let parts: Vec<String> = factors.iter().map(usize::to_string).collect();
                write!(f, "tensor:{}", parts.join("x"))
            }
            Shape::Fixed(FiltrationSpec::Dyadic { dim }) => write!(f, "dyadic:{dim}"),
            Shape::Fixed(FiltrationSpec::Comb { dim }) => write!(f, "comb:{dim}"),
            Shape::Fixed(spec) => f.write_str(&spec.label()),
            Shape::RandomPartition { dim, levels } => write!(f, "partition:{dim}x{levels}"),
        }
    }
}

fn parse_dims(s: &str) -> Option<Vec<usize>> {
    s.split('x').map(|t| t.trim().parse().ok()).collect()
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized filtration shape {s:?}"));
        let (kind, rest) = s.split_once(':').unwrap_or(("tensor", s));
        let dims = parse_dims(rest).ok_or_else(bad)?;
        let shape = match (kind.trim(), dims.as_slice()) {
            ("tensor", [_, ..]) => Shape::Fixed(FiltrationSpec::Tensor { factors: dims }),
            ("dyadic", [d]) => Shape::Fixed(FiltrationSpec::Dyadic { dim: *d }),
            ("comb", [d]) => Shape::Fixed(FiltrationSpec::Comb { dim: *d }),
            ("partition", [d, n]) => Shape::RandomPartition { dim: *d, levels: *n },
            _ => return Err(bad()),
        };
        shape.validate()?;
        Ok(shape)
    }
}

/// Parses a comma-separated list of shapes, as taken by `--dims`.
pub fn parse_shapes(s: &str) -> Result<Vec<Shape>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shape::Fixed(spec @ FiltrationSpec::Partition { .. }) => spec.serialize(s),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Spec(FiltrationSpec),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Spec(spec) => Ok(Shape::Fixed(spec)),
        }
    }
}

/// Instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `ξ_n = E_n(g_n)` for Ginibre `g_n`.
    Ginibre,
    /// Ginibre terms cut down by spectral projections in `M_n`, with some
    /// terms set to zero.
    RankDeficient,
    /// `E_n` of a real diagonal matrix plus a `1e-3` Ginibre perturbation.
    NearCommuting,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Ginibre => "ginibre",
            Family::RankDeficient => "rank-deficient",
            Family::NearCommuting => "near-commuting",
        })
    }
}

/// Checks a suite can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    DavisType1,
    DavisType2,
    MartingaleDavis,
    Previsible,
    QuasiDavis,
    Lepingle,
    P2Identity,
    RowLemma,
    Burkholder,
    PhiDavis,
    PhiBurkholder,
    Stein,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::DavisType1,
        CheckKind::DavisType2,
        CheckKind::MartingaleDavis,
        CheckKind::Previsible,
        CheckKind::QuasiDavis,
        CheckKind::Lepingle,
        CheckKind::P2Identity,
        CheckKind::RowLemma,
        CheckKind::Burkholder,
        CheckKind::PhiDavis,
        CheckKind::PhiBurkholder,
        CheckKind::Stein,
    ];
}

/// Ratios the extremal search can climb.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchCheck {
    Lepingle,
    DavisType1,
    DavisType2,
    MartingaleDavis,
    P2Identity,
    Stein,
}

impl FromStr for SearchCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown search check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub check: SearchCheck,
    /// Defaults to `comb:8` for the Lépingle–Yor ratio and to the first
    /// configured filtration otherwise.
    pub filtration: Option<Shape>,
    pub restarts: usize,
    pub steps: usize,
    pub sigma: f64,
    /// Consecutive non-improving steps before `sigma` is halved.
    pub patience: usize,
    pub p: Exponent,
    pub q: Exponent,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            check: SearchCheck::Lepingle,
            filtration: None,
            restarts: 4,
            steps: 3000,
            sigma: 0.3,
            patience: 20,
            p: Exponent(1.0),
            q: Exponent(4.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KfuncConfig {
    pub p: Exponent,
    pub q: Exponent,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub method: Option<Method>,
    /// Singular values of a fixed operator; a seeded Ginibre matrix of size
    /// `dim` is used when absent.
    pub diagonal: Option<Vec<f64>>,
    pub dim: usize,
}

impl Default for KfuncConfig {
    fn default() -> Self {
        Self {
            p: Exponent(1.0),
            q: Exponent::INF,
            t_min: 1e-3,
            t_max: 1e3,
            points: 25,
            method: None,
            diagonal: None,
            dim: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Format,
}

/// Everything a run depends on. Two runs of the same configuration produce
/// byte-identical row output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub instances: usize,
    pub filtrations: Vec<Shape>,
    pub families: Vec<Family>,
    pub checks: Vec<CheckKind>,
    pub davis_p: Vec<Exponent>,
    pub davis_q: Vec<Exponent>,
    pub type2_p: Vec<Exponent>,
    pub martingale_p: Vec<Exponent>,
    pub martingale_q: Vec<Exponent>,
    pub quasi_p: Vec<Exponent>,
    /// `(p, q, r)` triples with `1/p = 1/q + 1/r`.
    pub row_lemma: Vec<[Exponent; 3]>,
    pub spaces: Vec<SymmetricSpace>,
    pub phi: Vec<OrliczSpec>,
    pub stein_q: Vec<Exponent>,
    pub tolerance: Tolerances,
    pub search: SearchConfig,
    pub kfunc: KfuncConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 100,
            filtrations: vec![
                Shape::Fixed(FiltrationSpec::Tensor { factors: vec![2, 2, 2] }),
                Shape::RandomPartition { dim: 8, levels: 3 },
            ],
            families: vec![Family::Ginibre, Family::RankDeficient, Family::NearCommuting],
            checks: CheckKind::ALL.to_vec(),
            davis_p: exps(&[0.7, 1.0, 1.5]),
            davis_q: vec![Exponent(2.0), Exponent(4.0), Exponent::INF],
            type2_p: exps(&[0.3, 0.5, 0.65]),
            martingale_p: exps(&[1.0, 1.5]),
            martingale_q: exps(&[4.0]),
            quasi_p: exps(&[0.5]),
            row_lemma: vec![
                [Exponent(2.0), Exponent(4.0), Exponent(4.0)],
                [Exponent(4.0), Exponent(8.0), Exponent(8.0)],
            ],
            spaces: vec![
                SymmetricSpace::Lp { p: 3.0 },
                SymmetricSpace::Intersection { p: 2.0, q: 4.0 },
                SymmetricSpace::Lp { p: 1.5 },
                SymmetricSpace::Lp { p: 2.0 },
            ],
            phi: vec![
                OrliczSpec::Plog { p: 1.5, q: 0.4 },
                OrliczSpec::Plog { p: 1.3, q: 0.7 },
                OrliczSpec::Plog { p: 2.0, q: 1.0 },
            ],
            stein_q: exps(&[2.0, 4.0, 8.0]),
            tolerance: Tolerances::default(),
            search: SearchConfig::default(),
            kfunc: KfuncConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates JSON. Syntax and schema errors carry the line
    /// and column of the offending token.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, e: Error| Error::Config(format!("{name}: {e}"));
        if !self.checks.is_empty() && self.instances > 0 && (self.filtrations.is_empty() || self.families.is_empty()) {
            return Err(Error::Config("filtrations and families must be nonempty".into()));
        }
        for s in &self.filtrations {
            s.validate().map_err(|e| field("filtrations", e))?;
        }
        in_range("davis_p", &self.davis_p, |p| (2.0 / 3.0..2.0).contains(&p))?;
        in_range("davis_q", &self.davis_q, |q| q >= 2.0)?;
        in_range("type2_p", &self.type2_p, |p| p > 0.0 && p < 2.0)?;
        in_range("martingale_p", &self.martingale_p, |p| (1.0..2.0).contains(&p))?;
        in_range("martingale_q", &self.martingale_q, |q| q >= 2.0 && q.is_finite())?;
        in_range("quasi_p", &self.quasi_p, |p| p > 0.0 && p < 1.0)?;
        in_range("stein_q", &self.stein_q, |q| q > 0.0)?;
        for t in &self.row_lemma {
            let [p, q, r] = t.map(|e| e.0);
            if !(p >= 2.0 && q > 0.0 && r > 0.0) || (1.0 / p - 1.0 / q - 1.0 / r).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "row_lemma: triple ({}, {}, {}) must satisfy p >= 2 and 1/p = 1/q + 1/r",
                    t[0], t[1], t[2]
                )));
            }
        }
        for s in &self.spaces {
            s.validate().map_err(|e| field("spaces", e))?;
        }
        for phi in &self.phi {
            OrliczFunction::from_spec(phi).map_err(|e| field("phi", e))?;
        }
        let k = &self.kfunc;
        Couple::new(k.p.0, k.q.0).map_err(|e| field("kfunc", e))?;
        if !(k.t_min > 0.0 && k.t_max >= k.t_min && k.points >= 1 && k.dim >= 1) {
            return Err(Error::Config("kfunc: need 0 < t_min <= t_max, points >= 1, dim >= 1".into()));
        }
        let s = &self.search;
        if !(s.sigma > 0.0 && s.patience >= 1 && s.restarts >= 1) {
            return Err(Error::Config("search: need sigma > 0, patience >= 1, restarts >= 1".into()));
        }
        if !(self.tolerance.constant_slack >= 0.0 && self.tolerance.psd_slack >= 0.0 && self.tolerance.identity >= 0.0) {
            return Err(Error::Config("tolerance: values must be nonnegative".into()));
        }
        Ok(())
    }

    /// Filtration shape of instance `id`.
    pub fn shape_of(&self, id: usize) -> &Shape {
        &self.filtrations[id % self.filtrations.len()]
    }

    /// Family of instance `id`; families cycle once per pass over shapes.
    pub fn family_of(&self, id: usize) -> Family {
        self.families[(id / self.filtrations.len()) % self.families.len()]
    }

    pub fn search_shape(&self) -> Shape {
        match (&self.search.filtration, self.search.check) {
            (Some(s), _) => s.clone(),
            (None, SearchCheck::Lepingle) => Shape::Fixed(FiltrationSpec::Comb { dim: 8 }),
            (None, _) => self
                .filtrations
                .first()
                .cloned()
                .unwrap_or(Shape::Fixed(FiltrationSpec::Tensor { factors: vec![2, 2, 2] })),
        }
    }
}

fn in_range(name: &str, v: &[Exponent], ok: impl Fn(f64) -> bool) -> Result<()> {
    match v.iter().find(|e| !ok(e.0)) {
        Some(e) => Err(Error::Config(format!("{name}: exponent {e} out of range"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shapes_round_trip() {
        for s in ["tensor:2x3", "dyadic:16", "comb:8", "partition:16x4"] {
            let shape: Shape = s.parse().unwrap();
            assert_eq!(shape.to_string(), s);
        }
        assert_eq!("2x2".parse::<Shape>().unwrap().dim(), 4);
        assert!("dyadic:6".parse::<Shape>().is_err());
        assert!("blob:3".parse::<Shape>().is_err());
        assert_eq!(parse_shapes("2x2, comb:4").unwrap().len(), 2);
    }

    #[test]
    fn random_chains_refine() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        for (d, n) in [(16, 4), (8, 3), (5, 1), (32, 8)] {
            let chain = random_chain(d, n, &mut r);
            assert_eq!(chain.len(), n);
            assert!(Filtration::partition(chain).is_ok());
        }
    }

    #[test]
    fn config_json_round_trip() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(c.to_json().contains("\"inf\""));
    }

    #[test]
    fn config_errors_name_the_location() {
        let e = ExperimentConfig::from_json("{\n  \"seed\": 1,\n  \"instancez\": 3\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"davis_p": [0.5]}"#).unwrap_err();
        assert!(e.to_string().contains("davis_p"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"row_lemma": [[2, 4, 5]]}"#).unwrap_err();
        assert!(e.to_string().contains("row_lemma"), "{e}");
        let c = ExperimentConfig::from_json(r#"{"filtrations": ["comb:4", {"kind": "tensor", "factors": [2, 2]}]}"#).unwrap();
        assert_eq!(c.filtrations[1].dim(), 4);
    }
}
