use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::certificate::Check;
use crate::error::{Error, Result};

/// Fixed CSV column order.
pub const CSV_COLUMNS: [&str; 10] = [
    "instance_id",
    "check",
    "p",
    "q",
    "lhs",
    "rhs",
    "constant",
    "ratio",
    "pass",
    "seed",
];

/// Shortest round-trip decimal; `inf`, `-inf` and `nan` for non-finite
/// values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// One row per instance and check. Report-only rows have an empty
/// `constant` column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance_id: usize,
    pub seed: u64,
    pub filtration: String,
    pub family: String,
    #[serde(flatten)]
    pub check: Check,
}

impl ReportRow {
    fn csv_record(&self) -> [String; 10] {
        let c = &self.check;
        [
            self.instance_id.to_string(),
            c.name.clone(),
            fmt_opt(c.p),
            fmt_opt(c.q),
            fmt_f64(c.lhs),
            fmt_f64(c.rhs),
            if c.asserted { fmt_opt(c.constant) } else { String::new() },
            fmt_f64(c.ratio),
            c.pass.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Per `(check, p, q)` statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub check: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub asserted: bool,
    pub constant: Option<f64>,
    pub rows: usize,
    pub failures: usize,
    pub max_ratio: f64,
    pub argmax_instance: usize,
    pub argmax_seed: u64,
}

/// A row not tied to a generated instance, such as a growth experiment or
/// an Orlicz certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupplementaryRow {
    pub label: String,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub instances: usize,
    pub rows: usize,
    pub passed: bool,
    pub failures: Vec<ReportRow>,
    pub families: Vec<FamilySummary>,
    pub supplementary: Vec<SupplementaryRow>,
    pub runtime_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl CheckReport {
    pub fn new(seed: u64, instances: usize, rows: Vec<ReportRow>, supplementary: Vec<SupplementaryRow>) -> Self {
        let supplementary_ok = supplementary.iter().all(|s| s.check.pass);
        let families = summarize(&rows);
        let failures: Vec<ReportRow> = rows.iter().filter(|r| !r.check.pass).cloned().collect();
        let summary = Summary {
            seed,
            instances,
            rows: rows.len(),
            passed: failures.is_empty() && supplementary_ok,
            failures,
            families,
            supplementary,
            runtime_seconds: 0.0,
        };
        Self { rows, summary }
    }

    /// `true` iff every asserted row passed.
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_COLUMNS).map_err(io)?;
        for r in &self.rows {
            out.write_record(r.csv_record()).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Rows and summary as one JSON document.
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write_summary_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.summary).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn family(&self, check: &str, p: Option<f64>, q: Option<f64>) -> Option<&FamilySummary> {
        self.summary
            .families
            .iter()
            .find(|f| f.check == check && f.p == p && f.q == q)
    }
}

fn key(c: &Check) -> (String, Option<u64>, Option<u64>) {
    (c.name.clone(), c.p.map(f64::to_bits), c.q.map(f64::to_bits))
}

/// Families in order of first appearance.
fn summarize(rows: &[ReportRow]) -> Vec<FamilySummary> {
    let mut index: HashMap<(String, Option<u64>, Option<u64>), usize> = HashMap::new();
    let mut out: Vec<FamilySummary> = Vec::new();
    for r in rows {
        let c = &r.check;
        let i = *index.entry(key(c)).or_insert_with(|| {
            out.push(FamilySummary {
                check: c.name.clone(),
                p: c.p,
                q: c.q,
                asserted: c.asserted,
                constant: if c.asserted { c.constant } else { None },
                rows: 0,
                failures: 0,
                max_ratio: f64::NEG_INFINITY,
                argmax_instance: r.instance_id,
                argmax_seed: r.seed,
            });
            out.len() - 1
        });
        let fam = &mut out[i];
        fam.rows += 1;
        fam.failures += usize::from(!c.pass);
        if c.ratio > fam.max_ratio || (c.ratio.is_nan() && !fam.max_ratio.is_nan()) {
            fam.max_ratio = c.ratio;
            fam.argmax_instance = r.instance_id;
            fam.argmax_seed = r.seed;
        }
    }
    out
}
