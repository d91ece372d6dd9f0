//! Orlicz functions, grid certificates, indices and Φ-moment checks.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{singular_profile, Operator, PsdSpectrum};
use crate::certificate::{Certificate, Check};
use crate::davis::{martingale_davis, three_way_split};
use crate::error::{Error, Result};
use crate::filtration::Martingale;
use crate::kfunc::{golden_section_min, log_grid};
use crate::norms::{square_fn, Side};

pub const GRID_LO: f64 = 1e-6;
pub const GRID_HI: f64 = 1e6;
pub const GRID_POINTS: usize = 400;

/// Slack on normalized second differences in the convexity certificates.
pub const CONVEXITY_SLACK: f64 = 1e-9;

/// Configuration form of an Orlicz function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OrliczSpec {
    /// `c t^p`.
    Power {
        p: f64,
        #[serde(default = "one")]
        coefficient: f64,
    },
    /// `t^p log(1 + t^q)`.
    Plog { p: f64, q: f64 },
    /// Points `(t, Φ(t))` interpolated linearly in log-log coordinates.
    Table {
        points: Vec<[f64; 2]>,
        declared_p: f64,
        declared_q: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone)]
enum Eval {
    Power { p: f64, c: f64 },
    Plog { p: f64, q: f64 },
    Table { log_t: Vec<f64>, log_v: Vec<f64> },
    Conjugate { base: Arc<OrliczFunction>, table: Vec<f64> },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// An Orlicz function `Φ` on `[0, ∞)` with `Φ(0) = 0`, together with the
/// exponents it is claimed to be convex and concave for.
#[derive(Clone)]
pub struct OrliczFunction {
    eval: Eval,
    label: String,
    declared_p: f64,
    declared_q: f64,
    grid: Vec<f64>,
}

impl fmt::Debug for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczFunction")
            .field("label", &self.label)
            .field("declared_p", &self.declared_p)
            .field("declared_q", &self.declared_q)
            .finish()
    }
}

pub fn standard_grid() -> Vec<f64> {
    log_grid(GRID_LO, GRID_HI, GRID_POINTS)
}

impl OrliczFunction {
    pub fn power(p: f64) -> Result<Self> {
        Self::scaled_power(p, 1.0)
    }

    /// `c t^p` for `p ≥ 1`, `c > 0`.
    pub fn scaled_power(p: f64, c: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) || !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidOrlicz(format!("power family needs p >= 1 and c > 0, got p={p}, c={c}")));
        }
        let label = if c == 1.0 { format!("t^{p}") } else { format!("{c}*t^{p}") };
        Ok(Self::with(Eval::Power { p, c }, label, p, p))
    }

    /// `t^p log(1 + t^q)`, with indices `p` and `p + q`.
    pub fn plog(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
            return Err(Error::InvalidOrlicz(format!("plog family needs p >= 1 and q > 0, got p={p}, q={q}")));
        }
        Ok(Self::with(Eval::Plog { p, q }, format!("t^{p}*log(1+t^{q})"), p, p + q))
    }

    /// Log-log linear interpolation through the given points, extended by the
    /// end slopes.
    pub fn table(points: &[[f64; 2]], declared_p: f64, declared_q: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidOrlicz("table needs at least two points".into()));
        }
        let mut log_t = Vec::with_capacity(points.len());
        let mut log_v = Vec::with_capacity(points.len());
        for (i, [t, v]) in points.iter().copied().enumerate() {
            if !(t > 0.0 && v > 0.0 && t.is_finite() && v.is_finite()) {
                return Err(Error::InvalidOrlicz(format!("table point {i} must be positive and finite")));
            }
            if i > 0 && (t <= points[i - 1][0] || v < points[i - 1][1]) {
                return Err(Error::InvalidOrlicz(format!("table point {i} breaks monotonicity")));
            }
            log_t.push(t.ln());
            log_v.push(v.ln());
        }
        Ok(Self::with(Eval::Table { log_t, log_v }, format!("table({})", points.len()), declared_p, declared_q))
    }

    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        declared_p: f64,
        declared_q: f64,
    ) -> Self {
        Self::with(Eval::Custom(Arc::new(f)), label.into(), declared_p, declared_q)
    }

    pub fn from_spec(spec: &OrliczSpec) -> Result<Self> {
        match spec {
            OrliczSpec::Power { p, coefficient } => Self::scaled_power(*p, *coefficient),
            OrliczSpec::Plog { p, q } => Self::plog(*p, *q),
            OrliczSpec::Table {
                points,
                declared_p,
                declared_q,
            } => Self::table(points, *declared_p, *declared_q),
        }
    }

    fn with(eval: Eval, label: String, declared_p: f64, declared_q: f64) -> Self {
        Self {
            eval,
            label,
            declared_p,
            declared_q,
            grid: standard_grid(),
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = grid;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn declared_p(&self) -> f64 {
        self.declared_p
    }

    pub fn declared_q(&self) -> f64 {
        self.declared_q
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `Φ(t)` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.eval {
            Eval::Power { p, c } => c * t.powf(*p),
            Eval::Plog { p, q } => t.powf(*p) * t.powf(*q).ln_1p(),
            Eval::Table { log_t, log_v } => {
                let x = t.ln();
                let n = log_t.len();
                let i = match log_t.partition_point(|v| *v <= x) {
                    0 => 0,
                    k if k >= n => n - 2,
                    k => k - 1,
                };
                let slope = (log_v[i + 1] - log_v[i]) / (log_t[i + 1] - log_t[i]);
                (log_v[i] + slope * (x - log_t[i])).exp()
            }
            Eval::Conjugate { base, table } => {
                if let Ok(i) = self.grid.binary_search_by(|g| g.total_cmp(&t)) {
                    return table[i];
                }
                conjugate_value(base, t).unwrap_or(f64::INFINITY)
            }
            Eval::Custom(f) => f(t),
        }
    }

    /// `Φ'(t)`: closed form for the power and plog families, a central
    /// difference otherwise.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        let t = t.max(0.0);
        let d = match &self.eval {
            Eval::Power { p, c } => {
                if t == 0.0 {
                    if *p == 1.0 {
                        *c
                    } else {
                        0.0
                    }
                } else {
                    c * p * t.powf(p - 1.0)
                }
            }
            Eval::Plog { p, q } => {
                if t == 0.0 {
                    0.0
                } else {
                    let tq = t.powf(*q);
                    p * t.powf(p - 1.0) * tq.ln_1p() + t.powf(*p) * q * tq / (t * (1.0 + tq))
                }
            }
            _ => {
                let h = 1e-6 * t.max(1e-8);
                let lo = (t - h).max(0.0);
                (self.eval(t + h) - self.eval(lo)) / (t + h - lo)
            }
        };
        if !d.is_finite() || d < 0.0 {
            return Err(Error::DerivativeFailure(t));
        }
        Ok(d)
    }

    pub fn certificates(&self) -> OrliczCertificates {
        OrliczCertificates {
            nondecreasing: self.is_nondecreasing(),
            p_convex: self.convexity_certificate(self.declared_p, true),
            q_concave: self.convexity_certificate(self.declared_q, false),
            delta2: self.delta2_constant(),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        let v: Vec<f64> = self.grid.iter().map(|t| self.eval(*t)).collect();
        v.iter().all(|x| *x >= 0.0) && v.windows(2).all(|w| w[1] >= w[0])
    }

    /// Normalized second differences of `u ↦ Φ(u^{1/r})` on the grid
    /// `u_i = t_i^r`. For the convex case the certificate holds when every
    /// slope increment `(s_{i+1} - s_i) / max(|s_i|, |s_{i+1}|)` is at least
    /// `-1e-9`; the concave case mirrors it. `r = ∞` is accepted for
    /// concavity and always holds.
    pub fn convexity_certificate(&self, r: f64, convex: bool) -> ExponentCertificate {
        if r.is_infinite() && !convex {
            return ExponentCertificate {
                exponent: r,
                convex,
                worst: 0.0,
                pass: true,
            };
        }
        let u: Vec<f64> = self.grid.iter().map(|t| t.powf(r)).collect();
        let v: Vec<f64> = self.grid.iter().map(|t| self.eval(*t)).collect();
        let slopes: Vec<f64> = (0..u.len() - 1).map(|i| (v[i + 1] - v[i]) / (u[i + 1] - u[i])).collect();
        let sign = if convex { 1.0 } else { -1.0 };
        let mut worst = f64::INFINITY;
        for w in slopes.windows(2) {
            let scale = w[0].abs().max(w[1].abs());
            let inc = if scale > 0.0 { sign * (w[1] - w[0]) / scale } else { 0.0 };
            worst = worst.min(inc);
        }
        ExponentCertificate {
            exponent: r,
            convex,
            worst,
            pass: worst >= -CONVEXITY_SLACK,
        }
    }

    /// `max_t Φ(2t)/Φ(t)` over the grid; infinite when `Φ` vanishes at a
    /// grid point.
    pub fn delta2_constant(&self) -> f64 {
        self.grid
            .iter()
            .map(|t| {
                let a = self.eval(*t);
                if a > 0.0 {
                    self.eval(2.0 * t) / a
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    /// `Σ Φ(s_i(x))`.
    pub fn phi_moment(&self, x: &Operator) -> f64 {
        singular_profile(x).values().iter().map(|s| self.eval(*s)).sum()
    }

    /// `τ Φ(a^{1/2})` for positive `a`.
    pub fn phi_moment_sqrt(&self, a: &Operator) -> Result<f64> {
        let spec = PsdSpectrum::new(a)?;
        Ok(spec.values().iter().map(|v| self.eval(v.sqrt())).sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentCertificate {
    pub exponent: f64,
    pub convex: bool,
    /// Smallest normalized slope increment, sign-adjusted so that negative
    /// values are violations.
    pub worst: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrliczCertificates {
    pub nondecreasing: bool,
    pub p_convex: ExponentCertificate,
    pub q_concave: ExponentCertificate,
    pub delta2: f64,
}

impl OrliczCertificates {
    pub fn passed(&self) -> bool {
        self.nondecreasing && self.p_convex.pass && self.q_concave.pass && self.delta2.is_finite()
    }
}

/// Matuszewska–Orlicz index estimates with error bars.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub lower: f64,
    pub upper: f64,
    pub lower_error: f64,
    pub upper_error: f64,
}

/// Dilation points used for the lower and upper index surrogates.
pub const INDEX_T_SMALL: f64 = 1e-4;
pub const INDEX_T_LARGE: f64 = 1e4;

/// `log M_Φ(t) / log t` at `t = 1e-4` and `t = 1e4`, where
/// `M_Φ(t) = sup_s Φ(ts)/Φ(s)`.
///
/// The supremum runs over every decade of `s` on which both `Φ(s)` and
/// `Φ(ts)` are representable, so the limits at `0` and `∞` that define the
/// indices are reached as far as floating point allows. The error bar is the
/// difference between 8 and 32 samples per decade.
pub fn matuszewska_indices(phi: &OrliczFunction) -> Result<IndexEstimate> {
    let d2 = phi.delta2_constant();
    if !d2.is_finite() {
        return Err(Error::InvalidOrlicz(format!("{} fails the Δ2 certificate", phi.label)));
    }
    let est = |t: f64, per_decade: usize| -> Result<f64> {
        let m = dilation_sup(phi, t, per_decade)?;
        Ok(m.ln() / t.ln())
    };
    let lo_c = est(INDEX_T_SMALL, 8)?;
    let lo_f = est(INDEX_T_SMALL, 32)?;
    let hi_c = est(INDEX_T_LARGE, 8)?;
    let hi_f = est(INDEX_T_LARGE, 32)?;
    Ok(IndexEstimate {
        lower: lo_f,
        upper: hi_f,
        lower_error: (lo_f - lo_c).abs(),
        upper_error: (hi_f - hi_c).abs(),
    })
}

fn representable(v: f64) -> bool {
    v.is_finite() && (1e-280..=1e280).contains(&v)
}

/// `sup_s Φ(ts)/Φ(s)` over representable `s`.
pub fn dilation_sup(phi: &OrliczFunction, t: f64, per_decade: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    let mut seen = false;
    let steps = 600 * per_decade;
    for k in 0..=steps {
        let s = 10f64.powf(-300.0 + 600.0 * k as f64 / steps as f64);
        let (a, b) = (phi.eval(s), phi.eval(t * s));
        if representable(a) && representable(b) {
            best = best.max(b / a);
            seen = true;
        }
    }
    if !seen {
        return Err(Error::InvalidOrlicz(format!("{} is degenerate on the dilation grid", phi.label)));
    }
    Ok(best)
}

/// `Φ*(s) = sup_{t ≥ 0} (st - Φ(t))`.
pub fn conjugate_value(phi: &OrliczFunction, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| s * t - phi.eval(t);
    // bracket the maximizer of the concave objective between t/2 and 2t
    let mut t = 1.0;
    if f(2.0 * t) > f(t) {
        while f(2.0 * t) > f(t) {
            t *= 2.0;
            if t > 1e300 {
                return Err(Error::UnboundedConjugate(s));
            }
        }
    } else {
        while f(t / 2.0) > f(t) {
            t /= 2.0;
            if t < 1e-300 {
                return Ok(0.0);
            }
        }
    }
    let (lo, hi) = (t / 2.0, 2.0 * t);
    let (arg, _) = golden_section_min(|u| -f(u), lo, hi, 1e-13 * hi);
    Ok(f(arg).max(f(t)).max(0.0))
}

/// The complementary function `Φ*`, tabulated on the grid of `Φ`.
pub fn complementary(phi: &OrliczFunction) -> Result<OrliczFunction> {
    if !phi.convexity_certificate(1.0, true).pass {
        return Err(Error::InvalidOrlicz(format!("{} is not convex on its grid", phi.label)));
    }
    let table = phi
        .grid
        .iter()
        .map(|s| conjugate_value(phi, *s))
        .collect::<Result<Vec<f64>>>()?;
    let conj = |r: f64| if r <= 1.0 { f64::INFINITY } else { r / (r - 1.0) };
    Ok(OrliczFunction {
        eval: Eval::Conjugate {
            base: Arc::new(phi.clone()),
            table,
        },
        label: format!("({})*", phi.label),
        declared_p: conj(phi.declared_q),
        declared_q: conj(phi.declared_p),
        grid: phi.grid.clone(),
    })
}

/// Largest relative deviation `|Φ**(t) - Φ(t)| / Φ(t)` over the grid.
pub fn bidual_deviation(phi: &OrliczFunction) -> Result<f64> {
    let star = complementary(phi)?;
    let mut worst: f64 = 0.0;
    for &t in phi.grid() {
        let back = conjugate_value(&star, t)?;
        let v = phi.eval(t);
        worst = worst.max((back - v).abs() / v.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// `y = Φ'(x)` for positive `x`, with the equality `τ(xy) = τΦ(x) + τΦ*(y)`.
#[derive(Clone, Debug)]
pub struct DualityWitness {
    pub y: Operator,
    pub trace_xy: f64,
    pub phi_x: f64,
    pub phi_star_y: f64,
    pub commutator: f64,
    pub relative_gap: f64,
    pub pass: bool,
}

pub fn phi_duality_witness(phi: &OrliczFunction, x: &Operator) -> Result<DualityWitness> {
    let spec = PsdSpectrum::new(x)?;
    let lambdas = spec.values().to_vec();
    let derivs = lambdas.iter().map(|l| phi.derivative(*l)).collect::<Result<Vec<f64>>>()?;
    let y = spec.apply(|l| phi.derivative(l).unwrap_or(f64::NAN));
    let trace_xy = crate::algebra::real_trace(&(x * &y));
    let phi_x: f64 = lambdas.iter().map(|l| phi.eval(*l)).sum();
    let phi_star_y: f64 = derivs
        .iter()
        .map(|d| conjugate_value(phi, *d))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    let commutator = x.commutator(&y).max_abs();
    let rhs = phi_x + phi_star_y;
    let relative_gap = (trace_xy - rhs).abs() / trace_xy.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    let relative_gap = if trace_xy == 0.0 && rhs == 0.0 { 0.0 } else { relative_gap };
    let scale = x.max_abs().max(y.max_abs()).max(1.0);
    Ok(DualityWitness {
        y,
        trace_xy,
        phi_x,
        phi_star_y,
        commutator,
        relative_gap,
        pass: relative_gap <= 1e-5 && commutator <= 1e-9 * scale * scale,
    })
}

fn require(cert: ExponentCertificate, what: &str, phi: &OrliczFunction) -> Result<()> {
    if !cert.pass {
        return Err(Error::InvalidOrlicz(format!(
            "{} fails the {what} certificate at exponent {} (worst {:e})",
            phi.label, cert.exponent, cert.worst
        )));
    }
    Ok(())
}

/// Exponent at which the Davis construction is run for `Φ`: the declared
/// convexity exponent when it lies in `[1, 2)`, otherwise `1.5`.
pub fn construction_exponent(phi: &OrliczFunction) -> f64 {
    let p = phi.declared_p;
    if (1.0..2.0).contains(&p) {
        p
    } else {
        1.5
    }
}

/// Φ-moment forms of the two sides of the Davis decomposition:
///
/// * `phi_davis_split`: `τΦ(s_c(x^c)) + Σ τΦ(|dx_n^d|)` against `τΦ(S_c(x))`;
/// * `phi_davis_max`: `τΦ(S_c(x))` against `max{Σ τΦ(|dx_n|), τΦ(s_c(x))}`.
///
/// Both rows are report-only.
pub fn phi_davis_check(phi: &OrliczFunction, x: &Martingale) -> Result<Certificate> {
    let (p, q) = (phi.declared_p, phi.declared_q);
    if !(1.0 < p && p < q && q.is_finite()) {
        return Err(Error::InvalidOrlicz(format!("needs 1 < p < q < ∞, got p={p}, q={q}")));
    }
    require(phi.convexity_certificate(p, true), "convexity", phi)?;
    require(phi.convexity_certificate(q, false), "concavity", phi)?;
    let f = x.filtration();
    let p_dec = construction_exponent(phi);
    let split = martingale_davis(x, p_dec, q.max(2.0))?;
    let dx = x.differences();

    let sc_x = square_fn(dx, Some(f), Side::Column, false)?;
    let phi_sc = phi.phi_moment_sqrt(sc_x.final_sq().expect("nonempty"))?;
    let cond_c = square_fn(split.conditioned.differences(), Some(f), Side::Column, true)?;
    let phi_cond_c = phi.phi_moment_sqrt(cond_c.final_sq().expect("nonempty"))?;
    let phi_diag_d: f64 = split.diagonal.differences().iter().map(|d| phi.phi_moment(d)).sum();

    let phi_diag_x: f64 = dx.iter().map(|d| phi.phi_moment(d)).sum();
    let cond_x = square_fn(dx, Some(f), Side::Column, true)?;
    let phi_cond_x = phi.phi_moment_sqrt(cond_x.final_sq().expect("nonempty"))?;

    let mut cert = Certificate::new();
    cert.push(Check::report("phi_davis_split", Some(p), Some(q), phi_cond_c + phi_diag_d, phi_sc));
    cert.push(Check::report("phi_davis_max", Some(p), Some(q), phi_sc, phi_diag_x.max(phi_cond_x)));
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p`-convex for some `1 < p < 2` and 2-concave: infimum form.
    TwoConcave,
    /// 2-convex and `q`-concave for some `q > 2`: maximum form.
    TwoConvex,
}

/// Two-sided Φ-moment Burkholder ratios. In the 2-concave regime the
/// infimum over `x = x^d + x^c + x^r` is bounded by the three-way witness
/// split; in the 2-convex regime the maximum form is evaluated directly.
/// All rows are report-only.
pub fn phi_burkholder_check(phi: &OrliczFunction, x: &Martingale, regime: Regime) -> Result<Certificate> {
    let (p, q) = (phi.declared_p, phi.declared_q);
    match regime {
        Regime::TwoConcave => {
            if !(1.0 < p && p <= 2.0) {
                return Err(Error::InvalidOrlicz(format!("2-concave regime needs 1 < p ≤ 2, got p={p}")));
            }
            require(phi.convexity_certificate(p, true), "convexity", phi)?;
            require(phi.convexity_certificate(2.0, false), "2-concavity", phi)?;
        }
        Regime::TwoConvex => {
            if !(q >= 2.0) {
                return Err(Error::InvalidOrlicz(format!("2-convex regime needs q ≥ 2, got q={q}")));
            }
            require(phi.convexity_certificate(2.0, true), "2-convexity", phi)?;
            require(phi.convexity_certificate(q, false), "concavity", phi)?;
        }
    }
    let f = x.filtration();
    let phi_x = phi.phi_moment(&x.final_value());
    let mut cert = Certificate::new();
    match regime {
        Regime::TwoConcave => {
            let s = three_way_split(x, construction_exponent(phi))?;
            let c = square_fn(s.column.differences(), Some(f), Side::Column, true)?;
            let r = square_fn(s.row.differences(), Some(f), Side::Row, true)?;
            let witness = phi.phi_moment_sqrt(c.final_sq().expect("nonempty"))?
                + phi.phi_moment_sqrt(r.final_sq().expect("nonempty"))?
                + s.diagonal.differences().iter().map(|d| phi.phi_moment(d)).sum::<f64>();
            cert.push(Check::report("phi_burkholder_inf_upper", Some(p), Some(q), witness, phi_x));
            cert.push(Check::report("phi_burkholder_inf_lower", Some(p), Some(q), phi_x, witness));
        }
        Regime::TwoConvex => {
            let dx = x.differences();
            let diag: f64 = dx.iter().map(|d| phi.phi_moment(d)).sum();
            let c = square_fn(dx, Some(f), Side::Column, true)?;
            let r = square_fn(dx, Some(f), Side::Row, true)?;
            let m = diag
                .max(phi.phi_moment_sqrt(c.final_sq().expect("nonempty"))?)
                .max(phi.phi_moment_sqrt(r.final_sq().expect("nonempty"))?);
            cert.push(Check::report("phi_burkholder_max_upper", Some(p), Some(q), phi_x, m));
            cert.push(Check::report("phi_burkholder_max_lower", Some(p), Some(q), m, phi_x));
        }
    }
    Ok(cert)
}
