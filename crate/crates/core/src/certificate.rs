//! Inequality certificates shared by every check.

use serde::{Deserialize, Serialize};

use crate::tolerance::{slackened, Tolerances};

/// How `lhs` and `rhs` of a row are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ constant · rhs`.
    Bound,
    /// `|lhs - rhs| ≤ tol · max(|lhs|, |rhs|)`.
    Equality,
    /// `lhs` is a minimum eigenvalue, `rhs` minus its allowed slack.
    Positive,
    Report,
}

/// One evaluated inequality `lhs ≤ constant · rhs`.
///
/// Rows with `asserted == false` are report-only: they record `ratio` and
/// never fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: Option<f64>,
    pub ratio: f64,
    pub pass: bool,
    pub asserted: bool,
}

pub fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

impl Check {
    /// `lhs ≤ constant · rhs · (1 + 1e-7)`.
    pub fn bound(name: impl Into<String>, p: Option<f64>, q: Option<f64>, lhs: f64, rhs: f64, constant: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Bound,
            p,
            q,
            lhs,
            rhs,
            constant: Some(constant),
            ratio: ratio_of(lhs, rhs),
            pass: lhs <= slackened(constant) * rhs,
            asserted: true,
        }
    }

    pub fn report(name: impl Into<String>, p: Option<f64>, q: Option<f64>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Report,
            p,
            q,
            lhs,
            rhs,
            constant: None,
            ratio: ratio_of(lhs, rhs),
            pass: true,
            asserted: false,
        }
    }

    /// Positivity check: `lhs` is a minimum eigenvalue that must be at least
    /// `-slack`. The ratio column carries the minimum eigenvalue itself.
    pub fn psd(name: impl Into<String>, min_eigenvalue: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Positive,
            p: None,
            q: None,
            lhs: min_eigenvalue,
            rhs: -slack,
            constant: None,
            ratio: min_eigenvalue,
            pass: min_eigenvalue >= -slack,
            asserted: true,
        }
    }

    /// `|lhs - rhs| ≤ tol · max(|lhs|, |rhs|)`, reported with constant 1.
    pub fn equality(name: impl Into<String>, p: Option<f64>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Equality,
            p,
            q: None,
            lhs,
            rhs,
            constant: Some(1.0),
            ratio: ratio_of(lhs, rhs),
            pass: (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs()),
            asserted: true,
        }
    }

    /// Recomputes `pass` for an asserted row under different tolerances.
    pub fn rejudge(&mut self, tol: &Tolerances) {
        if !self.asserted {
            return;
        }
        self.pass = match self.relation {
            Relation::Bound => {
                let c = self.constant.unwrap_or(1.0);
                self.lhs <= c * (1.0 + tol.constant_slack) * self.rhs
            }
            Relation::Equality => (self.lhs - self.rhs).abs() <= tol.identity * self.lhs.abs().max(self.rhs.abs()),
            Relation::Positive => {
                self.rhs = -tol.psd_slack;
                self.lhs >= self.rhs
            }
            Relation::Report => true,
        };
    }

    /// Demote an asserted row to report-only.
    pub fn unasserted(mut self) -> Self {
        self.pass = true;
        self.asserted = false;
        self
    }
}

/// A bundle of checks for one instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_uses_multiplicative_slack() {
        assert!(Check::bound("a", None, None, 2.0 * (1.0 + 5e-8), 1.0, 2.0).pass);
        assert!(!Check::bound("a", None, None, 2.0 * (1.0 + 2e-7), 1.0, 2.0).pass);
        assert_eq!(Check::bound("a", None, None, 0.0, 0.0, 2.0).ratio, 0.0);
    }

    #[test]
    fn rejudge_applies_overrides() {
        let mut c = Check::bound("a", None, None, 2.0 * (1.0 + 2e-7), 1.0, 2.0);
        assert!(!c.pass);
        c.rejudge(&Tolerances {
            constant_slack: 1e-6,
            ..Tolerances::default()
        });
        assert!(c.pass);
        let mut e = Check::equality("e", None, 1.0, 1.0 + 1e-8, 1e-9);
        assert!(!e.pass);
        e.rejudge(&Tolerances {
            identity: 1e-7,
            ..Tolerances::default()
        });
        assert!(e.pass);
        let mut r = Check::report("r", None, None, 9.0, 1.0);
        r.rejudge(&Tolerances::default());
        assert!(r.pass);
    }

    #[test]
    fn report_never_fails() {
        let c = Check::report("r", Some(1.0), None, 10.0, 1.0);
        assert!(c.pass);
        assert_eq!(c.ratio, 10.0);
        let mut cert = Certificate::new();
        cert.push(c);
        cert.push(Check::psd("m", -1e-7, 1e-8));
        assert!(!cert.passed());
        assert_eq!(cert.failures().count(), 1);
    }
}
