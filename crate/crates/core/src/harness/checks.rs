use serde::{Deserialize, Serialize};

use crate::algebra::real_trace;
use crate::certificate::Check;
use crate::davis::{
    davis_type1, davis_type2, lepingle_yor_check, martingale_davis, previsible_davis, quasi_martingale_davis,
    row_lemma_check, three_way_split, verify_type1, verify_type2,
};
use crate::error::{Error, Result};
use crate::filtration::Martingale;
use crate::norms::{
    col_l2_norm, cond_col_norm_in, diag_norm_in, square_fn, symmetric_space_norm, Side, SymmetricSpace,
};
use crate::orlicz::{phi_burkholder_check, phi_davis_check, OrliczFunction, Regime};
use crate::tolerance::IDENTITY;

use super::config::{CheckKind, ExperimentConfig};
use super::instance::{stein_map, Instance};

/// Tolerance of the asserted `p = 2` identity in Burkholder rows.
pub const BURKHOLDER_IDENTITY: f64 = 1e-7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BurkholderRegime {
    /// `Lp` with `p < 2` and sums with upper exponent at most 2 use the
    /// infimum form; everything else the maximum form.
    #[default]
    Auto,
    Max,
    Sum,
}

impl BurkholderRegime {
    fn resolve(self, space: SymmetricSpace) -> BurkholderRegime {
        match self {
            BurkholderRegime::Auto => match space {
                SymmetricSpace::Lp { p } if p < 2.0 => BurkholderRegime::Sum,
                SymmetricSpace::Sum { q, .. } if q <= 2.0 => BurkholderRegime::Sum,
                _ => BurkholderRegime::Max,
            },
            r => r,
        }
    }
}

fn space_exponents(space: SymmetricSpace) -> (Option<f64>, Option<f64>) {
    match space {
        SymmetricSpace::Lp { p } => (Some(p), None),
        SymmetricSpace::Intersection { p, q } | SymmetricSpace::Sum { p, q } => (Some(p), Some(q)),
    }
}

fn adjoints(m: &Martingale) -> Vec<crate::algebra::Operator> {
    m.differences().iter().map(|d| d.adjoint()).collect()
}

/// Burkholder–Rosenthal ratios on a concrete symmetric space `E`.
///
/// Maximum form: `‖x‖_E` against `max{‖x‖_{h_E^d}, ‖s_c(x)‖_E, ‖s_r(x)‖_E}`,
/// both ratios reported. Infimum form: the three-way witness split bounds
/// the infimum from above. For `E = L_2` the identity `‖x‖_2 = ‖s_c(x)‖_2`
/// is asserted.
pub fn burkholder_check(x: &Martingale, space: SymmetricSpace, regime: BurkholderRegime) -> Result<Vec<Check>> {
    space.validate()?;
    let f = x.filtration();
    let (p, q) = space_exponents(space);
    let dx = x.differences();
    let norm_x = symmetric_space_norm(&x.final_value(), space)?;
    let mut rows = Vec::new();
    if space == (SymmetricSpace::Lp { p: 2.0 }) {
        let sc = cond_col_norm_in(dx, f, space)?;
        rows.push(Check::equality("burkholder_p2", p, norm_x, sc, BURKHOLDER_IDENTITY));
    }
    match regime.resolve(space) {
        BurkholderRegime::Sum => {
            let pc = match space {
                SymmetricSpace::Lp { p } | SymmetricSpace::Sum { p, .. } if (1.0..2.0).contains(&p) => p,
                SymmetricSpace::Lp { p } if p <= 1.0 => {
                    return Err(Error::ParameterRange(format!("infimum form needs p > 1, got {p}")))
                }
                _ => 1.5,
            };
            let s = three_way_split(x, pc)?;
            let witness = diag_norm_in(s.diagonal.differences(), space)?
                + cond_col_norm_in(s.column.differences(), f, space)?
                + cond_col_norm_in(&adjoints(&s.row), f, space)?;
            rows.push(Check::report("burkholder_inf_upper", p, q, witness, norm_x));
            rows.push(Check::report("burkholder_inf_lower", p, q, norm_x, witness));
        }
        _ => {
            let m = diag_norm_in(dx, space)?
                .max(cond_col_norm_in(dx, f, space)?)
                .max(cond_col_norm_in(&adjoints(x), f, space)?);
            rows.push(Check::report("burkholder_max_upper", p, q, norm_x, m));
            rows.push(Check::report("burkholder_max_lower", p, q, m, norm_x));
        }
    }
    Ok(rows)
}

/// `‖x‖_2² = Σ‖dx_n‖_2² = ‖S_c(x)‖_2² = ‖s_c(x)‖_2²`, asserted to relative
/// `tol`.
pub fn p2_identity_checks(x: &Martingale, tol: f64) -> Result<Vec<Check>> {
    let f = x.filtration();
    let dx = x.differences();
    let total = x.final_value().frobenius().powi(2);
    let sum: f64 = dx.iter().map(|d| d.frobenius().powi(2)).sum();
    let big = square_fn(dx, None, Side::Column, false)?;
    let small = square_fn(dx, Some(f), Side::Column, true)?;
    let trace = |r: &crate::norms::SquareFunctionReport| r.final_sq().map_or(0.0, real_trace);
    let p = Some(2.0);
    Ok(vec![
        Check::equality("p2_differences", p, sum, total, tol),
        Check::equality("p2_square_function", p, trace(&big), total, tol),
        Check::equality("p2_conditioned", p, trace(&small), total, tol),
    ])
}

/// `‖Θ(a)‖_{L_q(ℓ_2^c)}` against `‖a‖_{L_q(ℓ_2^c)}`; report-only.
pub fn stein_check(inst: &Instance, q: f64) -> Result<Check> {
    let theta = stein_map(inst.filtration(), &inst.raw)?;
    Ok(Check::report(
        "stein",
        None,
        Some(q),
        col_l2_norm(theta.differences(), q)?,
        col_l2_norm(&inst.raw, q)?,
    ))
}

/// Orlicz functions of a configuration with the Burkholder regime each one
/// qualifies for.
#[derive(Clone, Debug)]
pub struct PhiSet {
    pub functions: Vec<(OrliczFunction, Option<Regime>)>,
}

impl PhiSet {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let functions = config
            .phi
            .iter()
            .map(|spec| {
                let phi = OrliczFunction::from_spec(spec)?;
                Ok((phi.clone(), regime_of(&phi)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { functions })
    }
}

/// `TwoConvex` when the declared convexity exponent is at least 2,
/// `TwoConcave` when the declared concavity exponent is at most 2.
pub fn regime_of(phi: &OrliczFunction) -> Option<Regime> {
    if phi.declared_p() >= 2.0 {
        Some(Regime::TwoConvex)
    } else if phi.declared_q() <= 2.0 && phi.declared_p() > 1.0 {
        Some(Regime::TwoConcave)
    } else {
        None
    }
}

/// All configured checks on one instance, in configuration order.
pub fn evaluate(config: &ExperimentConfig, phis: &PhiSet, inst: &Instance) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for kind in &config.checks {
        match kind {
            CheckKind::DavisType1 => {
                let q: Vec<f64> = config.davis_q.iter().map(|e| e.0).collect();
                for p in &config.davis_p {
                    rows.extend(verify_type1(&davis_type1(&inst.xi, p.0)?, &q)?.checks);
                }
            }
            CheckKind::DavisType2 => {
                for p in &config.type2_p {
                    rows.extend(verify_type2(&davis_type2(&inst.xi, p.0)?)?.checks);
                }
            }
            CheckKind::MartingaleDavis => {
                for p in &config.martingale_p {
                    for q in &config.martingale_q {
                        rows.extend(martingale_davis(&inst.x, p.0, q.0)?.certificate.checks);
                    }
                }
            }
            CheckKind::Previsible => rows.extend(previsible_davis(&inst.x)?.certificate.checks),
            CheckKind::QuasiDavis => {
                for p in &config.quasi_p {
                    rows.push(quasi_martingale_davis(&inst.x, p.0)?);
                }
            }
            CheckKind::Lepingle => rows.push(lepingle_yor_check(&inst.xi)?),
            CheckKind::P2Identity => rows.extend(p2_identity_checks(&inst.x, IDENTITY)?),
            CheckKind::RowLemma => {
                for [p, q, r] in &config.row_lemma {
                    rows.push(row_lemma_check(inst.xi.terms(), &inst.aux, p.0, q.0, r.0)?);
                }
            }
            CheckKind::Burkholder => {
                for space in &config.spaces {
                    rows.extend(burkholder_check(&inst.x, *space, BurkholderRegime::Auto)?);
                }
            }
            CheckKind::PhiDavis => {
                for (phi, _) in &phis.functions {
                    rows.extend(phi_davis_check(phi, &inst.x)?.checks);
                }
            }
            CheckKind::PhiBurkholder => {
                for (phi, regime) in &phis.functions {
                    if let Some(r) = regime {
                        rows.extend(phi_burkholder_check(phi, &inst.x, *r)?.checks);
                    }
                }
            }
            CheckKind::Stein => {
                for q in &config.stein_q {
                    rows.push(stein_check(inst, q.0)?);
                }
            }
        }
    }
    Ok(rows)
}
