//! Square functions and sequence-space (quasi)norms.

use serde::{Deserialize, Serialize};

use crate::algebra::{schatten_norm, sqrt_schatten, Operator, PsdSpectrum, SingularProfile};
use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::kfunc::{k_functional_profile, Couple};
use crate::tolerance::FACTORIZATION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Column,
    Row,
}

/// Running square functions of a sequence.
///
/// `running_sq[n]` holds the squared partial sum `Σ_{k≤n+1} |t_k|²` (or its
/// conditioned variant); `final_value` is the square root of the last one.
#[derive(Clone, Debug)]
pub struct SquareFunctionReport {
    pub running_sq: Vec<Operator>,
    pub final_value: Operator,
    pub side: Side,
    pub conditioned: bool,
}

impl SquareFunctionReport {
    pub fn final_sq(&self) -> Option<&Operator> {
        self.running_sq.last()
    }

    /// Square root of every running term.
    pub fn running(&self) -> Result<Vec<Operator>> {
        self.running_sq
            .iter()
            .map(|a| Ok(PsdSpectrum::new(a)?.power(0.5)))
            .collect()
    }
}

fn side_square(t: &Operator, side: Side) -> Operator {
    match side {
        Side::Column => t.modulus_sq(),
        Side::Row => t.row_modulus_sq(),
    }
}

fn check_nonempty_dim(terms: &[Operator]) -> Result<usize> {
    let d = terms.first().map(Operator::dim).ok_or(Error::LengthMismatch { expected: 1, got: 0 })?;
    for t in terms {
        if t.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: t.dim() });
        }
    }
    Ok(d)
}

/// `S_c`, `S_r`, `s_c` or `s_r` of a sequence. `filtration` is required when
/// `conditioned` is set; term `n` (1-based) is conditioned by `E_{n-1}`.
pub fn square_fn(
    terms: &[Operator],
    filtration: Option<&Filtration>,
    side: Side,
    conditioned: bool,
) -> Result<SquareFunctionReport> {
    let d = check_nonempty_dim(terms)?;
    let mut acc = Operator::zeros(d);
    let mut running_sq = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let mut sq = side_square(t, side);
        if conditioned {
            let f = filtration.ok_or_else(|| {
                Error::InvalidFiltration("conditioned square function needs a filtration".into())
            })?;
            sq = f.predict(i + 1, &sq)?;
        }
        acc += &sq;
        running_sq.push(acc.clone());
    }
    let final_value = PsdSpectrum::new(&acc)?.power(0.5);
    Ok(SquareFunctionReport {
        running_sq,
        final_value,
        side,
        conditioned,
    })
}

fn sum_of_squares(terms: &[Operator], side: Side) -> Option<Operator> {
    let mut it = terms.iter();
    let mut acc = side_square(it.next()?, side);
    for t in it {
        acc += &side_square(t, side);
    }
    Some(acc)
}

/// `‖(Σ|a_n|²)^{1/2}‖_p`.
pub fn col_l2_norm(terms: &[Operator], p: f64) -> Result<f64> {
    match sum_of_squares(terms, Side::Column) {
        Some(a) => sqrt_schatten(&a, p),
        None => Ok(0.0),
    }
}

/// `‖(Σ|a_n*|²)^{1/2}‖_p`.
pub fn row_l2_norm(terms: &[Operator], p: f64) -> Result<f64> {
    match sum_of_squares(terms, Side::Row) {
        Some(a) => sqrt_schatten(&a, p),
        None => Ok(0.0),
    }
}

/// `‖(Σ E_{n-1}(a_n* a_n))^{1/2}‖_p`; at `p = ∞` the supremum over partial
/// sums.
pub fn cond_col_norm(terms: &[Operator], filtration: &Filtration, p: f64) -> Result<f64> {
    crate::algebra::check_exponent(p)?;
    if terms.is_empty() {
        return Ok(0.0);
    }
    let report = square_fn(terms, Some(filtration), Side::Column, true)?;
    if p.is_infinite() {
        let mut best: f64 = 0.0;
        for a in &report.running_sq {
            best = best.max(sqrt_schatten(a, p)?);
        }
        return Ok(best);
    }
    sqrt_schatten(report.final_sq().expect("nonempty"), p)
}

/// `‖a‖_{ℓ_p(L_p)} = (Σ‖a_n‖_p^p)^{1/p}`; `p = ∞` gives `max ‖a_n‖_∞`.
pub fn diag_norm(terms: &[Operator], p: f64) -> Result<f64> {
    crate::algebra::check_exponent(p)?;
    let norms = terms
        .iter()
        .map(|t| schatten_norm(t, p))
        .collect::<Result<Vec<f64>>>()?;
    crate::algebra::schatten_of_values(&norms, p)
}

/// One factorization `ξ_n = β_n α_n` of a sequence.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub beta: Vec<Operator>,
    pub alpha: Vec<Operator>,
}

impl Factorization {
    pub fn new(beta: Vec<Operator>, alpha: Vec<Operator>) -> Result<Self> {
        if beta.len() != alpha.len() {
            return Err(Error::LengthMismatch { expected: beta.len(), got: alpha.len() });
        }
        Ok(Self { beta, alpha })
    }

    /// Largest `‖β_n α_n - ξ_n‖_∞` entrywise deviation; errors above the
    /// factorization tolerance.
    pub fn check(&self, xi: &[Operator]) -> Result<f64> {
        if xi.len() != self.beta.len() {
            return Err(Error::LengthMismatch { expected: self.beta.len(), got: xi.len() });
        }
        let mut worst: f64 = 0.0;
        for (n, ((b, a), x)) in self.beta.iter().zip(&self.alpha).zip(xi).enumerate() {
            let dev = (b * a).max_abs_diff(x);
            let scale = x.max_abs().max(1.0);
            if dev > FACTORIZATION * scale {
                return Err(Error::FactorizationMismatch { index: n + 1, deviation: dev });
            }
            worst = worst.max(dev);
        }
        Ok(worst)
    }
}

/// Witness upper bound for `‖ξ‖_{L_p(ℓ_1^c)}`:
/// `(Σ‖β_n‖_2²)^{1/2} ‖(Σ|α_n|²)^{1/2}‖_q` with `1/p = 1/2 + 1/q`.
pub fn l1c_norm_upper(xi: &[Operator], factors: &Factorization, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidExponent(p));
    }
    factors.check(xi)?;
    if xi.is_empty() {
        return Ok(0.0);
    }
    let q = 2.0 * p / (2.0 - p);
    let beta_sq: f64 = factors.beta.iter().map(|b| b.frobenius().powi(2)).sum();
    Ok(beta_sq.sqrt() * col_l2_norm(&factors.alpha, q)?)
}

/// Concrete symmetric spaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetricSpace {
    Lp { p: f64 },
    Intersection { p: f64, q: f64 },
    Sum { p: f64, q: f64 },
}

impl SymmetricSpace {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SymmetricSpace::Lp { p } => crate::algebra::check_exponent(p),
            SymmetricSpace::Intersection { p, q } | SymmetricSpace::Sum { p, q } => Couple::new(p, q).map(|_| ()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SymmetricSpace::Lp { p } => format!("L{p}"),
            SymmetricSpace::Intersection { p, q } => format!("L{p}∩L{q}"),
            SymmetricSpace::Sum { p, q } => format!("L{p}+L{q}"),
        }
    }
}

pub fn norm_of_profile(profile: &SingularProfile, space: SymmetricSpace) -> Result<f64> {
    match space {
        SymmetricSpace::Lp { p } => profile.schatten(p),
        SymmetricSpace::Intersection { p, q } => {
            Couple::new(p, q)?;
            Ok(profile.schatten(p)?.max(profile.schatten(q)?))
        }
        SymmetricSpace::Sum { p, q } => Ok(k_functional_profile(profile, 1.0, Couple::new(p, q)?)?.value),
    }
}

pub fn symmetric_space_norm(x: &Operator, space: SymmetricSpace) -> Result<f64> {
    norm_of_profile(&crate::algebra::singular_profile(x), space)
}

/// `‖(Σ|a_n|²)^{1/2}‖_E` for a concrete symmetric space `E`.
pub fn col_norm_in(terms: &[Operator], space: SymmetricSpace) -> Result<f64> {
    match sum_of_squares(terms, Side::Column) {
        Some(a) => norm_of_sqrt(&a, space),
        None => Ok(0.0),
    }
}

/// `‖(Σ E_{n-1}|a_n|²)^{1/2}‖_E`.
pub fn cond_col_norm_in(terms: &[Operator], filtration: &Filtration, space: SymmetricSpace) -> Result<f64> {
    if terms.is_empty() {
        return Ok(0.0);
    }
    let report = square_fn(terms, Some(filtration), Side::Column, true)?;
    norm_of_sqrt(report.final_sq().expect("nonempty"), space)
}

/// `‖a‖_{h_E^d}`: the norm of the direct sum `⊕ a_n`, whose singular
/// profile is the merged profile of all terms.
pub fn diag_norm_in(terms: &[Operator], space: SymmetricSpace) -> Result<f64> {
    let values: Vec<f64> = terms
        .iter()
        .flat_map(|t| crate::algebra::singular_profile(t).values().to_vec())
        .collect();
    norm_of_profile(&SingularProfile::from_values(values), space)
}

fn norm_of_sqrt(a: &Operator, space: SymmetricSpace) -> Result<f64> {
    let spec = PsdSpectrum::new(a)?;
    let roots: Vec<f64> = spec.values().iter().map(|v| v.sqrt()).collect();
    norm_of_profile(&SingularProfile::from_values(roots), space)
}
