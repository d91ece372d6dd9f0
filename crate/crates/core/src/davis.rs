//! Davis-type decompositions of adapted sequences and martingales.
//!
//! With `ς_n² = Σ_{j≤n} |ξ_j|²`, `α = 1 - p/2` and `w_n = ς_n^α`, `w_0 = 0`:
//!
//! * type 1: `y_n = ξ_n w_n⁺ (w_n - w_{n-1})`, `z_n = ξ_n w_n⁺ w_{n-1}`;
//! * type 2: `y_n = ξ_n w_n⁻² (w_n² - w_{n-1}²)`, `z_n = ξ_n w_n⁻² w_{n-1}²`.
//!
//! Inverses are Moore–Penrose inverses on the support. Since
//! `|ξ_n|² ≤ ς_n²`, `ξ_n` vanishes off that support and `y_n + z_n = ξ_n`
//! holds exactly.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{real_trace, Operator, PsdSpectrum};
use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::filtration::{AdaptedSequence, Filtration, Martingale};
use crate::norms::{col_l2_norm, cond_col_norm, diag_norm, l1c_norm_upper, row_l2_norm, Factorization};
use crate::tolerance::{FACTORIZATION, PSD_SLACK};

/// `2 (2/p)^{1/2}`.
pub fn davis_constant(p: f64) -> f64 {
    2.0 * (2.0 / p).sqrt()
}

/// `2^{5/2}`.
pub const MARTINGALE_DAVIS_CONSTANT: f64 = 5.656854249492381;

/// `2√2`.
pub const LEPINGLE_CONSTANT: f64 = std::f64::consts::SQRT_2 * 2.0;

pub const TYPE1_Q_CONSTANT: f64 = 3.0;

/// `c` in `|dx_n^c|² ≤ c S_{c,n-1}²` for the previsible decomposition.
pub const PREVISIBLE_CONSTANT: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Type1,
    Type2,
}

/// Per-level spectral data of `ς_n²`.
#[derive(Clone, Debug)]
struct Level {
    sigma_sq: Operator,
    spectrum: PsdSpectrum,
    weight: Operator,
    weight_pinv: Operator,
}

#[derive(Clone, Debug)]
pub struct DavisDecomposition {
    pub xi: AdaptedSequence,
    pub y: AdaptedSequence,
    pub z: AdaptedSequence,
    pub weights: Vec<Operator>,
    pub variant: Variant,
    pub p: f64,
    pub alpha: f64,
    /// `true` when `p` lies in the range where the decomposition's theorem
    /// applies: `[2/3, 2)` for type 1 and `(0, 2/3)` for type 2.
    pub in_theorem_range: bool,
    /// Type 2 only: `β_n`, `α_n` with `y_n = β_n α_n`.
    pub witness: Option<Factorization>,
    levels: Vec<Level>,
}

fn levels(xi: &AdaptedSequence, alpha: f64) -> Result<Vec<Level>> {
    let d = xi.filtration().dim();
    let mut acc = Operator::zeros(d);
    let mut out = Vec::with_capacity(xi.len());
    for t in xi.terms() {
        acc += &t.modulus_sq();
        let spectrum = PsdSpectrum::new(&acc)?;
        let weight = spectrum.power(alpha / 2.0);
        let weight_pinv = spectrum.support_power(-alpha / 2.0, None);
        out.push(Level {
            sigma_sq: acc.clone(),
            spectrum,
            weight,
            weight_pinv,
        });
    }
    Ok(out)
}

fn check_p(p: f64, lo: f64, lo_inclusive: bool) -> Result<()> {
    let ok_lo = if lo_inclusive { p >= lo } else { p > lo };
    if !(ok_lo && p < 2.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

fn adapted(f: &Arc<Filtration>, terms: Vec<Operator>) -> Result<AdaptedSequence> {
    AdaptedSequence::new(f.clone(), terms)
}

/// Type 1 decomposition for `2/3 ≤ p < 2`.
pub fn davis_type1(xi: &AdaptedSequence, p: f64) -> Result<DavisDecomposition> {
    check_p(p, 2.0 / 3.0, true)?;
    let alpha = 1.0 - p / 2.0;
    let levels = levels(xi, alpha)?;
    let f = xi.filtration();
    let mut y = Vec::with_capacity(xi.len());
    let mut z = Vec::with_capacity(xi.len());
    let mut prev = Operator::zeros(f.dim());
    for (t, lv) in xi.terms().iter().zip(&levels) {
        let a = t * &lv.weight_pinv;
        y.push(&a * &(&lv.weight - &prev));
        z.push(&a * &prev);
        prev = lv.weight.clone();
    }
    Ok(DavisDecomposition {
        xi: xi.clone(),
        y: adapted(f, y)?,
        z: adapted(f, z)?,
        weights: levels.iter().map(|l| l.weight.clone()).collect(),
        variant: Variant::Type1,
        p,
        alpha,
        in_theorem_range: true,
        witness: None,
        levels,
    })
}

/// Type 2 decomposition, defined for `0 < p < 2`.
pub fn davis_type2(xi: &AdaptedSequence, p: f64) -> Result<DavisDecomposition> {
    check_p(p, 0.0, false)?;
    let alpha = 1.0 - p / 2.0;
    let levels = levels(xi, alpha)?;
    let f = xi.filtration();
    let n = xi.len();
    let (mut y, mut z) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut beta, mut alph) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut prev_sq = Operator::zeros(f.dim());
    for (t, lv) in xi.terms().iter().zip(&levels) {
        let w_sq = lv.spectrum.power(alpha);
        let inv_sq = lv.spectrum.support_power(-alpha, None);
        let a = t * &inv_sq;
        let inc = &w_sq - &prev_sq;
        let inc_root = PsdSpectrum::new(&inc)?.power(0.5);
        y.push(&a * &inc);
        z.push(&a * &prev_sq);
        beta.push(&a * &inc_root);
        alph.push(inc_root);
        prev_sq = w_sq;
    }
    Ok(DavisDecomposition {
        xi: xi.clone(),
        y: adapted(f, y)?,
        z: adapted(f, z)?,
        weights: levels.iter().map(|l| l.weight.clone()).collect(),
        variant: Variant::Type2,
        p,
        alpha,
        in_theorem_range: p < 2.0 / 3.0,
        witness: Some(Factorization::new(beta, alph)?),
        levels,
    })
}

impl DavisDecomposition {
    /// Largest entrywise `|y_n + z_n - ξ_n|`.
    pub fn reconstruction_error(&self) -> f64 {
        self.y
            .terms()
            .iter()
            .zip(self.z.terms())
            .zip(self.xi.terms())
            .map(|((a, b), x)| (a + b).max_abs_diff(x))
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of `w_n - w_{n-1}` over all `n`, normalized by
    /// `max(1, ‖w_n‖)`.
    pub fn weight_monotonicity_margin(&self) -> f64 {
        let mut prev = Operator::zeros(self.xi.filtration().dim());
        let mut worst = f64::INFINITY;
        for w in &self.weights {
            let gap = (w - &prev).spectrum();
            let scale = gap.radius().max(1.0);
            worst = worst.min(gap.min() / scale);
            prev = w.clone();
        }
        worst
    }

    /// `Σ ‖ξ_n w_n⁺‖_2²` and `‖ξ‖_{L_p(ℓ_2^c)}^p`.
    pub fn l2_sides(&self) -> Result<(f64, f64)> {
        let lhs: f64 = self
            .xi
            .terms()
            .iter()
            .zip(&self.levels)
            .map(|(t, lv)| (t * &lv.weight_pinv).frobenius().powi(2))
            .sum();
        let rhs = col_l2_norm(self.xi.terms(), self.p)?.powf(self.p);
        Ok((lhs, rhs))
    }

    /// Worst step of `τ(ς_n^{p-2}(ς_n² - ς_{n-1}²)) ≤ (2/p) τ(ς_n^p - ς_{n-1}^p)`,
    /// returned as `(lhs, rhs)` of the step with the largest ratio.
    pub fn step_lemma_worst(&self) -> (f64, f64) {
        let p = self.p;
        let d = self.xi.filtration().dim();
        let mut prev_sq = Operator::zeros(d);
        let mut prev_p = Operator::zeros(d);
        let mut worst = (0.0, 0.0);
        let mut worst_ratio = f64::NEG_INFINITY;
        for lv in &self.levels {
            let neg = lv.spectrum.support_power((p - 2.0) / 2.0, None);
            let cur_p = lv.spectrum.power(p / 2.0);
            let lhs = real_trace(&(&neg * &(&lv.sigma_sq - &prev_sq)));
            let rhs = real_trace(&(&cur_p - &prev_p));
            let r = crate::certificate::ratio_of(lhs, rhs);
            if r > worst_ratio {
                worst_ratio = r;
                worst = (lhs, rhs);
            }
            prev_sq = lv.sigma_sq.clone();
            prev_p = cur_p;
        }
        worst
    }

    fn structural_checks(&self, cert: &mut Certificate) -> Result<()> {
        let p = Some(self.p);
        let scale = self.xi.terms().iter().map(Operator::max_abs).fold(1.0, f64::max);
        cert.push(Check::bound(
            "reconstruction",
            p,
            None,
            self.reconstruction_error(),
            scale,
            FACTORIZATION,
        ));
        cert.push(Check::psd("weight_monotone", self.weight_monotonicity_margin(), 1e-9));
        let (l, r) = self.l2_sides()?;
        cert.push(Check::bound("l2", p, None, l, r, 2.0 / self.p));
        let (l, r) = self.step_lemma_worst();
        cert.push(Check::bound("step_lemma", p, None, l, r, 2.0 / self.p));
        Ok(())
    }
}

/// Certificate for a type 1 decomposition: the `p`-side bound, the `q`-side
/// bound for each `q ≥ 2` in `q_list`, and the intermediate `(L2)` and
/// step inequalities.
pub fn verify_type1(d: &DavisDecomposition, q_list: &[f64]) -> Result<Certificate> {
    if d.variant != Variant::Type1 {
        return Err(Error::ParameterRange("verify_type1 needs a type 1 decomposition".into()));
    }
    let p = d.p;
    let f = d.xi.filtration();
    let mut cert = Certificate::new();
    let norm_p = col_l2_norm(d.xi.terms(), p)?;
    let lhs = diag_norm(d.y.terms(), p)? + cond_col_norm(d.z.terms(), f, p)?;
    cert.push(Check::bound("davis_type1", Some(p), None, lhs, norm_p, davis_constant(p)));
    for &q in q_list.iter().filter(|q| **q >= 2.0) {
        let lhs = col_l2_norm(d.y.terms(), q)? + col_l2_norm(d.z.terms(), q)?;
        let rhs = col_l2_norm(d.xi.terms(), q)?;
        cert.push(Check::bound("davis_type1_q", Some(p), Some(q), lhs, rhs, TYPE1_Q_CONSTANT));
    }
    d.structural_checks(&mut cert)?;
    Ok(cert)
}

/// Certificate for a type 2 decomposition, using the canonical
/// factorization witness for the `L_p(ℓ_1^c)` term. Outside `(0, 2/3)` the
/// main bound is report-only.
pub fn verify_type2(d: &DavisDecomposition) -> Result<Certificate> {
    let witness = match (&d.variant, &d.witness) {
        (Variant::Type2, Some(w)) => w,
        _ => return Err(Error::ParameterRange("verify_type2 needs a type 2 decomposition".into())),
    };
    let p = d.p;
    let f = d.xi.filtration();
    let mut cert = Certificate::new();
    let norm_p = col_l2_norm(d.xi.terms(), p)?;
    let lhs = l1c_norm_upper(d.y.terms(), witness, p)? + cond_col_norm(d.z.terms(), f, p)?;
    let main = Check::bound("davis_type2", Some(p), None, lhs, norm_p, davis_constant(p));
    cert.push(if d.in_theorem_range { main } else { main.unasserted() });
    d.structural_checks(&mut cert)?;
    Ok(cert)
}

/// A martingale decomposition `x = x^d + x^c`.
#[derive(Clone, Debug)]
pub struct MartingaleSplit {
    pub diagonal: Martingale,
    pub conditioned: Martingale,
    pub certificate: Certificate,
}

/// Centers an adapted sequence into martingale differences. The first term
/// is kept as is: under `E_0 = E_1` centering would erase it. Each term is
/// passed through `E_n` first to remove rounding outside `M_n`.
fn center(seq: &AdaptedSequence) -> Result<Martingale> {
    let f = seq.filtration();
    let diffs = seq
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let t = f.cond_expect(i + 1, t)?;
            if i == 0 {
                Ok(t)
            } else {
                Ok(&t - &f.predict(i + 1, &t)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Martingale::from_differences(f.clone(), diffs)
}

fn split_norms(split_d: &Martingale, split_c: &Martingale, p: f64) -> Result<f64> {
    let f = split_c.filtration();
    Ok(cond_col_norm(split_c.differences(), f, p)? + diag_norm(split_d.differences(), p)?)
}

fn reconstruction_check(x: &Martingale, dd: &Martingale, dc: &Martingale, cert: &mut Certificate) {
    let err = x
        .differences()
        .iter()
        .zip(dd.differences().iter().zip(dc.differences()))
        .map(|(a, (b, c))| (b + c).max_abs_diff(a))
        .fold(0.0, f64::max);
    let scale = x.differences().iter().map(Operator::max_abs).fold(1.0, f64::max);
    cert.push(Check::bound("martingale_reconstruction", None, None, err, scale, FACTORIZATION));
}

/// Martingale decomposition from the type 1 construction applied to the
/// differences of `x`, for `1 ≤ p < 2 ≤ q < ∞`. The `p`-side bound with
/// constant `2^{5/2}` is asserted; the `q`-side ratio is report-only.
pub fn martingale_davis(x: &Martingale, p: f64, q: f64) -> Result<MartingaleSplit> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidExponent(p));
    }
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(q));
    }
    let d = davis_type1(&x.as_adapted(), p)?;
    let diagonal = center(&d.y)?;
    let conditioned = center(&d.z)?;
    let mut cert = Certificate::new();
    reconstruction_check(x, &diagonal, &conditioned, &mut cert);
    let hp = col_l2_norm(x.differences(), p)?;
    cert.push(Check::bound(
        "martingale_davis",
        Some(p),
        None,
        split_norms(&diagonal, &conditioned, p)?,
        hp,
        MARTINGALE_DAVIS_CONSTANT,
    ));
    let hq = col_l2_norm(x.differences(), q)?;
    cert.push(Check::report(
        "martingale_davis_q",
        Some(p),
        Some(q),
        split_norms(&diagonal, &conditioned, q)?,
        hq,
    ));
    Ok(MartingaleSplit {
        diagonal,
        conditioned,
        certificate: cert,
    })
}

/// Type 2 construction at `p = 1`, where `w_n² = S_{c,n}`:
/// `dx_n^c = dx_n S_{c,n}⁻¹ S_{c,n-1}` centered. Asserts the `2^{5/2}` bound
/// and `|dx_n^c|² ≤ 4 S_{c,n-1}²` for every `n`. The smallest constant `c`
/// with `|dx_n^c|² ≤ c S_{c,n-1}²` is reported against 2 in
/// `previsible_constant`; classical examples exceed 2 (see the tests).
pub fn previsible_davis(x: &Martingale) -> Result<MartingaleSplit> {
    let d = davis_type2(&x.as_adapted(), 1.0)?;
    let diagonal = center(&d.y)?;
    let conditioned = center(&d.z)?;
    let mut cert = Certificate::new();
    reconstruction_check(x, &diagonal, &conditioned, &mut cert);
    let h1 = col_l2_norm(x.differences(), 1.0)?;
    cert.push(Check::bound(
        "previsible_davis",
        Some(1.0),
        None,
        split_norms(&diagonal, &conditioned, 1.0)?,
        h1,
        MARTINGALE_DAVIS_CONSTANT,
    ));
    let mut prev_sq = Operator::zeros(x.filtration().dim());
    let mut worst = f64::INFINITY;
    let mut constant: f64 = 0.0;
    for (dc, lv) in conditioned.differences().iter().zip(&d.levels) {
        let m = dc.modulus_sq();
        let gap = &prev_sq.scale(PREVISIBLE_CONSTANT) - &m;
        worst = worst.min(gap.min_eigenvalue());
        let inv = PsdSpectrum::new(&prev_sq)?.support_power(-0.5, None);
        constant = constant.max(-(&(&inv * &m) * &inv).scale(-1.0).min_eigenvalue());
        prev_sq = lv.sigma_sq.clone();
    }
    cert.push(Check::psd("previsible_bound", worst, PSD_SLACK));
    cert.push(Check::report("previsible_constant", Some(1.0), None, constant, 2.0));
    Ok(MartingaleSplit {
        diagonal,
        conditioned,
        certificate: cert,
    })
}

/// Martingale form of the type 2 construction for `0 < p < 1`. No constant
/// is available in this range, so the row is report-only.
pub fn quasi_martingale_davis(x: &Martingale, p: f64) -> Result<Check> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let d = davis_type2(&x.as_adapted(), p)?;
    let diagonal = center(&d.y)?;
    let conditioned = center(&d.z)?;
    Ok(Check::report(
        "martingale_davis_quasi",
        Some(p),
        None,
        split_norms(&diagonal, &conditioned, p)?,
        col_l2_norm(x.differences(), p)?,
    ))
}

/// Witness decomposition `x = x^d + x^c + x^r`: the type 1 construction at
/// `p` applied to `x` gives `x = d_1 + c`, applied to `x*` gives
/// `x = d_2 + r`, and the two are averaged.
#[derive(Clone, Debug)]
pub struct ThreeWaySplit {
    pub diagonal: Martingale,
    pub column: Martingale,
    pub row: Martingale,
}

pub fn three_way_split(x: &Martingale, p: f64) -> Result<ThreeWaySplit> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidExponent(p));
    }
    let col = davis_type1(&x.as_adapted(), p)?;
    let row = davis_type1(&x.adjoint().as_adapted(), p)?;
    let d1 = center(&col.y)?;
    let c = center(&col.z)?;
    let d2 = center(&row.y)?.adjoint();
    let r = center(&row.z)?.adjoint();
    let f = x.filtration().clone();
    let diagonal = d1
        .differences()
        .iter()
        .zip(d2.differences())
        .map(|(a, b)| (a + b).scale(0.5))
        .collect();
    Ok(ThreeWaySplit {
        diagonal: Martingale::from_differences(f, diagonal)?,
        column: c.scale(0.5),
        row: r.scale(0.5),
    })
}

/// `‖(Σ|E_{n-1} ξ_n|²)^{1/2}‖_1 ≤ 2√2 ‖(Σ|ξ_n|²)^{1/2}‖_1`.
pub fn lepingle_yor_check(xi: &AdaptedSequence) -> Result<Check> {
    let f = xi.filtration();
    let predicted = xi
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| f.predict(i + 1, t))
        .collect::<Result<Vec<_>>>()?;
    let lhs = col_l2_norm(&predicted, 1.0)?;
    let rhs = col_l2_norm(xi.terms(), 1.0)?;
    Ok(Check::bound("lepingle_yor", Some(1.0), None, lhs, rhs, LEPINGLE_CONSTANT))
}

/// `‖(a_n A)‖_{L_p(ℓ_2^r)} ≤ max(‖a‖_{L_q(ℓ_2^c)}, ‖a‖_{L_q(ℓ_2^r)}) ‖A‖_r`
/// for `2 ≤ p ≤ ∞` and `1/p = 1/q + 1/r`.
pub fn row_lemma_check(a: &[Operator], big_a: &Operator, p: f64, q: f64, r: f64) -> Result<Check> {
    if !(p >= 2.0) || !(q > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidExponent(p));
    }
    let mismatch = (1.0 / p - 1.0 / q - 1.0 / r).abs();
    if mismatch > 1e-12 {
        return Err(Error::ParameterRange(format!(
            "exponents must satisfy 1/p = 1/q + 1/r, got p={p}, q={q}, r={r}"
        )));
    }
    let aa = big_a.row_modulus_sq();
    let mut acc = Operator::zeros(big_a.dim());
    for an in a {
        acc += &(&(an * &aa) * &an.adjoint());
    }
    let lhs = crate::algebra::sqrt_schatten(&acc, p)?;
    let rhs = col_l2_norm(a, q)?.max(row_l2_norm(a, q)?) * crate::algebra::schatten_norm(big_a, r)?;
    Ok(Check::bound("row_lemma", Some(p), Some(q), lhs, rhs, 1.0))
}
