//! Filtrations of subalgebras, trace-preserving conditional expectations,
//! adapted sequences and martingales.
//!
//! Two concrete models are provided:
//!
//! * **tensor**: `M_D = M_{d_1} ⊗ … ⊗ M_{d_N}` with `M_n` the first `n`
//!   factors tensored with identities. `E_n` is the normalized partial trace
//!   over the remaining factors.
//! * **partition**: a refining chain of partitions of `{0..D}` with `M_n` the
//!   diagonal matrices constant on the blocks of `P_n`. `E_n` averages the
//!   diagonal over blocks (and discards off-diagonal entries). This is the
//!   classical, commutative model; its ambient algebra is the diagonal.
//!
//! Index `0` is accepted everywhere and means `E_1`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Operator, TracialAlgebra, C64};
use crate::error::{Error, Result};
use crate::random::ginibre;
use crate::tolerance::MEMBERSHIP;

/// Serializable description of a filtration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiltrationSpec {
    /// Tensor factors `(d_1, …, d_N)`.
    Tensor { factors: Vec<usize> },
    /// Explicit partitions as block labels, one vector of length `D` per level.
    Partition { partitions: Vec<Vec<usize>> },
    /// `D = 2^N`; `P_n` has `2^n` consecutive blocks.
    Dyadic { dim: usize },
    /// `P_1` trivial; `P_{n+1}` splits point `n-1` off the last block, so
    /// there are `D` levels ending in singletons.
    Comb { dim: usize },
}

impl FiltrationSpec {
    pub fn build(&self) -> Result<Filtration> {
        match self {
            FiltrationSpec::Tensor { factors } => Filtration::tensor(factors),
            FiltrationSpec::Partition { partitions } => Filtration::partition(partitions.clone()),
            FiltrationSpec::Dyadic { dim } => Filtration::dyadic(*dim),
            FiltrationSpec::Comb { dim } => Filtration::comb(*dim),
        }
    }

    /// Short label used in reports, e.g. `tensor(2x2x2)`.
    pub fn label(&self) -> String {
        match self {
            FiltrationSpec::Tensor { factors } => {
                let f: Vec<String> = factors.iter().map(|d| d.to_string()).collect();
                format!("tensor({})", f.join("x"))
            }
            FiltrationSpec::Partition { partitions } => format!(
                "partition(D={},N={})",
                partitions.first().map_or(0, |p| p.len()),
                partitions.len()
            ),
            FiltrationSpec::Dyadic { dim } => format!("dyadic({dim})"),
            FiltrationSpec::Comb { dim } => format!("comb({dim})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Model {
    Tensor {
        factors: Vec<usize>,
        /// `prefix[n] = d_1 ⋯ d_n`, with `prefix[0] = 1`.
        prefix: Vec<usize>,
    },
    Partition {
        /// Canonical block labels per level.
        labels: Vec<Vec<usize>>,
        block_sizes: Vec<Vec<usize>>,
    },
}

/// An increasing chain `M_1 ⊆ … ⊆ M_N` with conditional expectations `E_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    algebra: TracialAlgebra,
    model: Model,
    spec: FiltrationSpec,
}

impl Filtration {
    pub fn tensor(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidFiltration("no tensor factors".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidFiltration("tensor factor of size 0".into()));
        }
        let mut prefix = vec![1usize];
        for &d in factors {
            prefix.push(prefix.last().unwrap() * d);
        }
        let dim = *prefix.last().unwrap();
        Ok(Self {
            algebra: TracialAlgebra::new(dim)?,
            model: Model::Tensor {
                factors: factors.to_vec(),
                prefix,
            },
            spec: FiltrationSpec::Tensor {
                factors: factors.to_vec(),
            },
        })
    }

    /// Builds a partition filtration from block labels. Each level must
    /// refine the previous one and the last level must be all singletons.
    pub fn partition(partitions: Vec<Vec<usize>>) -> Result<Self> {
        Self::partition_with_spec(partitions.clone(), FiltrationSpec::Partition { partitions })
    }

    fn partition_with_spec(partitions: Vec<Vec<usize>>, spec: FiltrationSpec) -> Result<Self> {
        let Some(first) = partitions.first() else {
            return Err(Error::InvalidFiltration("no partitions".into()));
        };
        let dim = first.len();
        let algebra = TracialAlgebra::new(dim)?;
        let mut labels: Vec<Vec<usize>> = Vec::with_capacity(partitions.len());
        let mut block_sizes = Vec::with_capacity(partitions.len());
        for (n, p) in partitions.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidFiltration(format!(
                    "partition {} has length {}, expected {dim}",
                    n + 1,
                    p.len()
                )));
            }
            let (canon, sizes) = canonical_labels(p);
            if let Some(prev) = labels.last() {
                check_refines(prev, &canon, n + 1)?;
            }
            labels.push(canon);
            block_sizes.push(sizes);
        }
        if block_sizes.last().unwrap().len() != dim {
            return Err(Error::InvalidFiltration(
                "last partition must consist of singletons".into(),
            ));
        }
        Ok(Self {
            algebra,
            model: Model::Partition {
                labels,
                block_sizes,
            },
            spec,
        })
    }

    pub fn dyadic(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidFiltration(format!(
                "dyadic dimension must be a power of two >= 2, got {dim}"
            )));
        }
        let levels = dim.trailing_zeros() as usize;
        let partitions = (1..=levels)
            .map(|n| {
                let block = dim >> n;
                (0..dim).map(|i| i / block).collect()
            })
            .collect();
        Self::partition_with_spec(partitions, FiltrationSpec::Dyadic { dim })
    }

    pub fn comb(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let partitions = (0..dim)
            .map(|n| (0..dim).map(|i| i.min(n)).collect())
            .collect();
        Self::partition_with_spec(partitions, FiltrationSpec::Comb { dim })
    }

    pub fn spec(&self) -> &FiltrationSpec {
        &self.spec
    }

    pub fn algebra(&self) -> TracialAlgebra {
        self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Number of levels `N`.
    pub fn len(&self) -> usize {
        match &self.model {
            Model::Tensor { factors, .. } => factors.len(),
            Model::Partition { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self.model, Model::Partition { .. })
    }

    fn level(&self, n: usize) -> Result<usize> {
        if n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.len(),
            });
        }
        Ok(n.max(1))
    }

    /// `E_n(x)`, with `E_0 = E_1`.
    pub fn cond_expect(&self, n: usize, x: &Operator) -> Result<Operator> {
        let n = self.level(n)?;
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(match &self.model {
            Model::Tensor { prefix, .. } => partial_trace_expectation(x, self.dim() / prefix[n]),
            Model::Partition {
                labels,
                block_sizes,
            } => block_average(x, &labels[n - 1], &block_sizes[n - 1]),
        })
    }

    /// `‖E_n(x) - x‖` entrywise; zero iff `x ∈ M_n`.
    pub fn membership_deviation(&self, n: usize, x: &Operator) -> Result<f64> {
        Ok(self.cond_expect(n, x)?.max_abs_diff(x))
    }

    /// `E_{n-1}` applied with the `E_0 = E_1` convention; `n` is 1-based.
    pub fn predict(&self, n: usize, x: &Operator) -> Result<Operator> {
        self.cond_expect(n.saturating_sub(1), x)
    }
}

fn canonical_labels(p: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut map = std::collections::HashMap::new();
    let mut sizes = Vec::new();
    let canon = p
        .iter()
        .map(|l| {
            let next = map.len();
            let c = *map.entry(*l).or_insert(next);
            if c == sizes.len() {
                sizes.push(0);
            }
            sizes[c] += 1;
            c
        })
        .collect();
    (canon, sizes)
}

fn check_refines(coarse: &[usize], fine: &[usize], level: usize) -> Result<()> {
    let mut parent: std::collections::HashMap<usize, usize> = Default::default();
    for (c, f) in coarse.iter().zip(fine) {
        match parent.insert(*f, *c) {
            Some(prev) if prev != *c => {
                return Err(Error::InvalidFiltration(format!(
                    "partition {level} does not refine partition {}",
                    level - 1
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// `(id ⊗ tr/R)(x) ⊗ 1_R` with the traced factor of size `rest` last.
fn partial_trace_expectation(x: &Operator, rest: usize) -> Operator {
    if rest == 1 {
        return x.clone();
    }
    let d = x.dim();
    let outer = d / rest;
    let m = x.matrix();
    let mut reduced = Matrix::zeros(outer, outer);
    for a in 0..outer {
        for b in 0..outer {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..rest {
                acc += m[(a * rest + c, b * rest + c)];
            }
            reduced[(a, b)] = acc / rest as f64;
        }
    }
    let mut out = Matrix::zeros(d, d);
    for a in 0..outer {
        for b in 0..outer {
            let v = reduced[(a, b)];
            for c in 0..rest {
                out[(a * rest + c, b * rest + c)] = v;
            }
        }
    }
    Operator::from_matrix(out)
}

fn block_average(x: &Operator, labels: &[usize], sizes: &[usize]) -> Operator {
    let mut sums = vec![C64::new(0.0, 0.0); sizes.len()];
    for (i, &l) in labels.iter().enumerate() {
        sums[l] += x.entry(i, i);
    }
    let diag: Vec<C64> = labels
        .iter()
        .map(|&l| sums[l] / sizes[l] as f64)
        .collect();
    Operator::from_diagonal(&diag)
}

/// A sequence `(ξ_1, …, ξ_K)`, `K ≤ N`, with `ξ_n ∈ M_n`.
#[derive(Clone, Debug)]
pub struct AdaptedSequence {
    filtration: Arc<Filtration>,
    terms: Vec<Operator>,
}

impl AdaptedSequence {
    pub fn new(filtration: Arc<Filtration>, terms: Vec<Operator>) -> Result<Self> {
        check_length(&filtration, terms.len())?;
        for (i, t) in terms.iter().enumerate() {
            let deviation = filtration.membership_deviation(i + 1, t)?;
            if deviation > MEMBERSHIP * t.max_abs().max(1.0) {
                return Err(Error::NotAdapted {
                    index: i + 1,
                    deviation,
                });
            }
        }
        Ok(Self { filtration, terms })
    }

    /// Projects arbitrary terms onto the filtration: `ξ_n = E_n(a_n)`.
    pub fn project(filtration: Arc<Filtration>, terms: &[Operator]) -> Result<Self> {
        check_length(&filtration, terms.len())?;
        let terms = terms
            .iter()
            .enumerate()
            .map(|(i, a)| filtration.cond_expect(i + 1, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { filtration, terms })
    }

    pub(crate) fn new_unchecked(filtration: Arc<Filtration>, terms: Vec<Operator>) -> Self {
        Self { filtration, terms }
    }

    pub fn filtration(&self) -> &Arc<Filtration> {
        &self.filtration
    }

    pub fn terms(&self) -> &[Operator] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Operator> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            filtration: self.filtration.clone(),
            terms: self.terms.iter().map(|t| t.scale(c)).collect(),
        }
    }
}

fn check_length(f: &Filtration, len: usize) -> Result<()> {
    if len > f.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            got: len,
        });
    }
    Ok(())
}

/// A finite martingale given by its differences `dx_n`.
#[derive(Clone, Debug)]
pub struct Martingale {
    filtration: Arc<Filtration>,
    differences: Vec<Operator>,
}

impl Martingale {
    /// Checks `dx_n ∈ M_n` and `E_{n-1}(dx_n) = 0` for `n ≥ 2`.
    pub fn from_differences(filtration: Arc<Filtration>, differences: Vec<Operator>) -> Result<Self> {
        check_length(&filtration, differences.len())?;
        for (i, d) in differences.iter().enumerate() {
            let n = i + 1;
            let scale = d.max_abs().max(1.0);
            let deviation = filtration.membership_deviation(n, d)?;
            if deviation > MEMBERSHIP * scale {
                return Err(Error::NotAdapted {
                    index: n,
                    deviation,
                });
            }
            if n >= 2 {
                let deviation = filtration.cond_expect(n - 1, d)?.max_abs();
                if deviation > MEMBERSHIP * scale {
                    return Err(Error::NotMartingaleDifference {
                        index: n,
                        deviation,
                    });
                }
            }
        }
        Ok(Self {
            filtration,
            differences,
        })
    }

    /// `dx_n = E_n(x) - E_{n-1}(x)` with `x_0 = 0`, over all `N` levels.
    pub fn from_final(filtration: Arc<Filtration>, x: &Operator) -> Result<Self> {
        let mut differences = Vec::with_capacity(filtration.len());
        let mut prev = Operator::zeros(filtration.dim());
        for n in 1..=filtration.len() {
            let cur = filtration.cond_expect(n, x)?;
            differences.push(&cur - &prev);
            prev = cur;
        }
        Ok(Self {
            filtration,
            differences,
        })
    }

    pub fn filtration(&self) -> &Arc<Filtration> {
        &self.filtration
    }

    pub fn differences(&self) -> &[Operator] {
        &self.differences
    }

    pub fn len(&self) -> usize {
        self.differences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.differences.is_empty()
    }

    /// Partial sums `x_1, …, x_K`.
    pub fn partial_sums(&self) -> Vec<Operator> {
        let mut acc = Operator::zeros(self.filtration.dim());
        self.differences
            .iter()
            .map(|d| {
                acc += d;
                acc.clone()
            })
            .collect()
    }

    /// The last partial sum, `x_K` (zero for an empty martingale).
    pub fn final_value(&self) -> Operator {
        let mut acc = Operator::zeros(self.filtration.dim());
        for d in &self.differences {
            acc += d;
        }
        acc
    }

    /// The martingale `x*`.
    pub fn adjoint(&self) -> Martingale {
        Self {
            filtration: self.filtration.clone(),
            differences: self.differences.iter().map(Operator::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Martingale {
        Self {
            filtration: self.filtration.clone(),
            differences: self.differences.iter().map(|d| d.scale(c)).collect(),
        }
    }

    /// The differences viewed as an adapted sequence.
    pub fn as_adapted(&self) -> AdaptedSequence {
        AdaptedSequence::new_unchecked(self.filtration.clone(), self.differences.clone())
    }
}

/// `dx_n = E_n(x) - E_{n-1}(x)`.
pub fn martingale_from_final(f: &Arc<Filtration>, x: &Operator) -> Result<Martingale> {
    Martingale::from_final(f.clone(), x)
}

/// `ξ_n = E_n(g_n)` for independent Ginibre `g_n` of the given scale,
/// deterministic in `seed`.
pub fn random_adapted(f: &Arc<Filtration>, seed: u64, scale: f64) -> AdaptedSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_adapted_with(f, &mut rng, scale)
}

pub fn random_adapted_with<R: rand::Rng + ?Sized>(
    f: &Arc<Filtration>,
    rng: &mut R,
    scale: f64,
) -> AdaptedSequence {
    let terms = (1..=f.len())
        .map(|n| {
            let g = ginibre(f.dim(), scale, rng);
            f.cond_expect(n, &g).expect("level in range")
        })
        .collect();
    AdaptedSequence::new_unchecked(f.clone(), terms)
}

/// Martingale generated by `E_n` of one Ginibre matrix.
pub fn random_martingale_with<R: rand::Rng + ?Sized>(
    f: &Arc<Filtration>,
    rng: &mut R,
    scale: f64,
) -> Martingale {
    let g = ginibre(f.dim(), scale, rng);
    Martingale::from_final(f.clone(), &g).expect("dimension matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::schatten_norm;
    use crate::random::random_psd;

    fn arc(f: Filtration) -> Arc<Filtration> {
        Arc::new(f)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn tensor_partial_trace_hand_example() {
        let f = Filtration::tensor(&[2, 2]).unwrap();
        let x = Operator::from_real_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let e1 = f.cond_expect(1, &x).unwrap();
        let want = Operator::from_real_diagonal(&[1.5, 1.5, 3.5, 3.5]);
        assert!(e1.max_abs_diff(&want) < 1e-15);
        assert_eq!(f.cond_expect(0, &x).unwrap(), e1);
    }

    #[test]
    fn final_expectation_is_identity_on_ambient_model() {
        let mut r = rng(1);
        let t = Filtration::tensor(&[2, 3]).unwrap();
        let x = ginibre(6, 1.0, &mut r);
        assert!(t.cond_expect(2, &x).unwrap().max_abs_diff(&x) < 1e-15);

        let p = Filtration::dyadic(8).unwrap();
        let d = Operator::from_real_diagonal(&[1., 2., 3., 4., 5., 6., 7., 8.]);
        assert!(p.cond_expect(3, &d).unwrap().max_abs_diff(&d) < 1e-15);
    }

    #[test]
    fn index_out_of_range() {
        let f = Filtration::tensor(&[2, 2]).unwrap();
        let x = Operator::identity(4);
        assert_eq!(
            f.cond_expect(3, &x),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        );
    }

    #[test]
    fn tower_property() {
        let mut r = rng(2);
        for f in [Filtration::tensor(&[2, 2, 2]).unwrap(), Filtration::dyadic(8).unwrap()] {
            let x = ginibre(8, 1.0, &mut r);
            for m in 0..=3 {
                for n in 0..=3 {
                    let a = f.cond_expect(n, &f.cond_expect(m, &x).unwrap()).unwrap();
                    let b = f.cond_expect(m.min(n), &x).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-10, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn expectation_is_positive_trace_preserving_contractive() {
        let mut r = rng(3);
        let f = Filtration::tensor(&[2, 3, 2]).unwrap();
        for _ in 0..5 {
            let p = random_psd(12, &mut r);
            let x = ginibre(12, 1.0, &mut r);
            for n in 1..=3 {
                let ep = f.cond_expect(n, &p).unwrap();
                assert!(ep.min_eigenvalue() >= -1e-10);
                let ex = f.cond_expect(n, &x).unwrap();
                assert!((ex.trace() - x.trace()).norm() < 1e-10);
                let eex = f.cond_expect(n, &ex).unwrap();
                assert!(eex.max_abs_diff(&ex) < 1e-10);
                for q in [1.0, 2.0, f64::INFINITY] {
                    assert!(schatten_norm(&ex, q).unwrap() <= schatten_norm(&x, q).unwrap() * (1.0 + 1e-10));
                }
            }
        }
    }

    #[test]
    fn bimodule_property() {
        let mut r = rng(4);
        let f = Filtration::tensor(&[2, 2, 2]).unwrap();
        for n in 1..=3 {
            let a = f.cond_expect(n, &ginibre(8, 1.0, &mut r)).unwrap();
            let b = f.cond_expect(n, &ginibre(8, 1.0, &mut r)).unwrap();
            let x = ginibre(8, 1.0, &mut r);
            let lhs = f.cond_expect(n, &(&(&a * &x) * &b)).unwrap();
            let rhs = &(&a * &f.cond_expect(n, &x).unwrap()) * &b;
            assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        }
    }

    #[test]
    fn partition_validation() {
        assert!(Filtration::partition(vec![vec![0, 0, 1, 1], vec![0, 1, 2, 3]]).is_ok());
        // not refining
        let bad = Filtration::partition(vec![vec![0, 0, 1, 1], vec![0, 1, 1, 2], vec![0, 1, 2, 3]]);
        assert!(matches!(bad, Err(Error::InvalidFiltration(_))));
        // last not singletons
        let bad = Filtration::partition(vec![vec![0, 0, 1, 1]]);
        assert!(matches!(bad, Err(Error::InvalidFiltration(_))));
        assert!(Filtration::dyadic(6).is_err());
        let c = Filtration::comb(4).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn martingale_from_final_examples() {
        let f = arc(Filtration::tensor(&[2, 2, 2]).unwrap());
        let mut r = rng(5);
        // x in M_1
        let x = f.cond_expect(1, &ginibre(8, 1.0, &mut r)).unwrap();
        let m = martingale_from_final(&f, &x).unwrap();
        assert!(m.differences()[0].max_abs_diff(&x) < 1e-14);
        assert!(m.differences()[1..].iter().all(|d| d.max_abs() < 1e-14));

        let id = martingale_from_final(&f, &Operator::identity(8)).unwrap();
        assert!(id.differences()[0].max_abs_diff(&Operator::identity(8)) < 1e-14);

        let g = ginibre(8, 1.0, &mut r);
        let m = martingale_from_final(&f, &g).unwrap();
        assert!(m.final_value().max_abs_diff(&f.cond_expect(3, &g).unwrap()) < 1e-10);
        // passes the martingale invariant and E_m(x_n) = x_m
        let checked = Martingale::from_differences(f.clone(), m.differences().to_vec()).unwrap();
        let sums = checked.partial_sums();
        for mm in 1..=3 {
            for n in mm..=3 {
                let e = f.cond_expect(mm, &sums[n - 1]).unwrap();
                assert!(e.max_abs_diff(&sums[mm - 1]) < 1e-10);
            }
        }
    }

    #[test]
    fn martingale_rejects_uncentered_differences() {
        let f = arc(Filtration::tensor(&[2, 2]).unwrap());
        let d = vec![Operator::identity(4), Operator::identity(4)];
        assert!(matches!(
            Martingale::from_differences(f, d),
            Err(Error::NotMartingaleDifference { index: 2, .. })
        ));
    }

    #[test]
    fn random_adapted_contract() {
        let f = arc(Filtration::tensor(&[2, 2, 2]).unwrap());
        let a = random_adapted(&f, 42, 1.0);
        let b = random_adapted(&f, 42, 1.0);
        for (x, y) in a.terms().iter().zip(b.terms()) {
            assert_eq!(x, y);
        }
        assert!(AdaptedSequence::new(f.clone(), a.terms().to_vec()).is_ok());
        let z = random_adapted(&f, 7, 0.0);
        assert!(z.terms().iter().all(|t| t.max_abs() == 0.0));
    }

    #[test]
    fn spec_round_trip() {
        for spec in [
            FiltrationSpec::Tensor { factors: vec![2, 3] },
            FiltrationSpec::Dyadic { dim: 8 },
            FiltrationSpec::Comb { dim: 5 },
        ] {
            let json = serde_json::to_string(&spec).unwrap();
            let back: FiltrationSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back.build().unwrap().spec(), &spec);
        }
    }
}
