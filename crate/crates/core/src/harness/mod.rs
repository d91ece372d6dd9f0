//! Experiment harness: instance generation, sweeps, extremal search and
//! reports.

mod checks;
mod config;
mod instance;
mod report;
mod search;

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use checks::{
    burkholder_check, evaluate, p2_identity_checks, regime_of, stein_check, BurkholderRegime, PhiSet,
    BURKHOLDER_IDENTITY,
};
pub use config::{
    parse_shapes, random_chain, CheckKind, ExperimentConfig, Exponent, Family, Format, KfuncConfig, OutputConfig,
    SearchCheck, SearchConfig, Shape,
};
pub use instance::{double_or_nothing, instance_seed, martingale_transform, stein_map, Instance};
pub use report::{fmt_f64, CheckReport, FamilySummary, ReportRow, Summary, SupplementaryRow, CSV_COLUMNS};
pub use search::{extremal_search, search_row, SearchResult, TracePoint};

use crate::algebra::Operator;
use crate::certificate::Check;
use crate::davis::quasi_martingale_davis;
use crate::error::{Error, Result};
use crate::kfunc::{log_grid, Couple, KFunctionalCurve, Method};
use crate::orlicz::matuszewska_indices;
use crate::random::ginibre;

/// Largest level count of the double-or-nothing growth experiment.
pub const GROWTH_LEVELS: usize = 6;

/// Rows of one instance, with the tolerance overrides applied.
pub fn run_instance(config: &ExperimentConfig, phis: &PhiSet, id: usize) -> Result<Vec<ReportRow>> {
    let inst = Instance::for_config(config, id)?;
    let wrap = |e: Error| Error::Instance {
        id,
        seed: inst.seed,
        message: e.to_string(),
    };
    let checks = evaluate(config, phis, &inst).map_err(wrap)?;
    let filtration = inst.shape.to_string();
    let family = inst.family.to_string();
    Ok(checks
        .into_iter()
        .map(|mut c| {
            c.rejudge(&config.tolerance);
            ReportRow {
                instance_id: id,
                seed: inst.seed,
                filtration: filtration.clone(),
                family: family.clone(),
                check: c,
            }
        })
        .collect())
}

/// Runs every configured check on every instance. Instances are evaluated
/// in parallel and merged in index order, so the rows do not depend on the
/// thread count.
pub fn run_suite(config: &ExperimentConfig) -> Result<CheckReport> {
    config.validate()?;
    let start = Instant::now();
    let phis = PhiSet::from_config(config)?;
    let rows = if config.checks.is_empty() {
        Vec::new()
    } else {
        (0..config.instances)
            .into_par_iter()
            .map(|id| run_instance(config, &phis, id))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()
    };
    let supplementary = supplementary_rows(config, &phis)?;
    let mut report = CheckReport::new(config.seed, config.instances, rows, supplementary);
    report.summary.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Instance-independent rows: the double-or-nothing growth of the
/// quasi-Banach Davis ratio, and the certificates and indices of each
/// Orlicz function.
pub fn supplementary_rows(config: &ExperimentConfig, phis: &PhiSet) -> Result<Vec<SupplementaryRow>> {
    let mut out = Vec::new();
    if config.checks.contains(&CheckKind::QuasiDavis) {
        for p in &config.quasi_p {
            out.extend(quasi_growth(p.0, GROWTH_LEVELS)?);
        }
    }
    if config.checks.iter().any(|c| matches!(c, CheckKind::PhiDavis | CheckKind::PhiBurkholder)) {
        for (phi, _) in &phis.functions {
            let (p, q) = (Some(phi.declared_p()), Some(phi.declared_q()));
            let label = phi.label().to_string();
            let cert = phi.certificates();
            let row = |check: Check| SupplementaryRow {
                label: label.clone(),
                check,
            };
            out.push(row(Check::report("phi_p_convexity", p, q, cert.p_convex.worst, 1.0)));
            out.push(row(Check::report("phi_q_concavity", p, q, cert.q_concave.worst, 1.0)));
            out.push(row(Check::report("phi_delta2", p, q, cert.delta2, 1.0)));
            let idx = matuszewska_indices(phi)?;
            out.push(row(Check::report("phi_lower_index", p, q, idx.lower, phi.declared_p())));
            out.push(row(Check::report("phi_upper_index", p, q, idx.upper, phi.declared_q())));
        }
    }
    Ok(out)
}

/// Quasi-Banach Davis ratio of the double-or-nothing martingale for
/// `1..=levels` levels.
pub fn quasi_growth(p: f64, levels: usize) -> Result<Vec<SupplementaryRow>> {
    (1..=levels)
        .map(|n| {
            Ok(SupplementaryRow {
                label: format!("double-or-nothing N={n}"),
                check: quasi_martingale_davis(&double_or_nothing(n)?, p)?,
            })
        })
        .collect()
}

/// K-functional curve of the configured operator.
pub fn kfunc_curve(config: &ExperimentConfig) -> Result<KFunctionalCurve> {
    let k = &config.kfunc;
    let couple = Couple::new(k.p.0, k.q.0)?;
    let x = match &k.diagonal {
        Some(d) => Operator::from_real_diagonal(d),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            ginibre(k.dim, 1.0 / (k.dim as f64).sqrt(), &mut rng)
        }
    };
    let method = k.method.unwrap_or(if couple.p() == 1.0 && couple.q().is_infinite() {
        Method::ExactL1Linf
    } else {
        Method::ConvexOpt
    });
    KFunctionalCurve::compute(&x, couple, &log_grid(k.t_min, k.t_max, k.points), method)
}

/// Writes `report.csv` or `report.json` (by format) and `summary.json` into
/// `dir`.
pub fn write_report(report: &CheckReport, dir: &Path, format: Format) -> Result<()> {
    fs::create_dir_all(dir)?;
    match format {
        Format::Csv => report.write_csv(fs::File::create(dir.join("report.csv"))?)?,
        Format::Json => report.write_json(fs::File::create(dir.join("report.json"))?)?,
    }
    report.write_summary_json(fs::File::create(dir.join("summary.json"))?)
}
