//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by an operation or a certificate lives here so that
//! the acceptance suite and the library agree on a single set of numbers.

/// Eigenvalues of a nominally positive operator at or above `-PSD_CLAMP` are
/// clamped to zero before functional calculus.
pub const PSD_CLAMP: f64 = 1e-10;

/// Relative rank cutoff for pseudo-inverses, scaled by the spectral radius.
pub const RANK_REL: f64 = 1e-12;

/// Multiplicative slack applied to every asserted inequality constant.
pub const CONSTANT_SLACK: f64 = 1e-7;

/// Additive slack on minimum eigenvalues in PSD-order assertions.
pub const PSD_SLACK: f64 = 1e-8;

/// Membership tolerance for adaptedness and martingale-difference checks.
pub const MEMBERSHIP: f64 = 1e-10;

/// Maximum entrywise mismatch allowed for an explicit factorization.
pub const FACTORIZATION: f64 = 1e-8;

/// Multiplies a constant by `1 + CONSTANT_SLACK`.
pub fn slackened(constant: f64) -> f64 {
    constant * (1.0 + CONSTANT_SLACK)
}

/// Relative tolerance for exact identities such as `‖x‖_2² = Σ‖dx_n‖_2²`.
pub const IDENTITY: f64 = 1e-9;

/// Run-time overrides of the assertion tolerances.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub constant_slack: f64,
    pub psd_slack: f64,
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            constant_slack: CONSTANT_SLACK,
            psd_slack: PSD_SLACK,
            identity: IDENTITY,
        }
    }
}
