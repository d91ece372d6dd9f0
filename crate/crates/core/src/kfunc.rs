//! K- and J-functionals for Schatten couples `(L_p, L_q)`.
//!
//! The K-functional of an operator depends only on its singular values, so
//! every computation runs on the commutative vector `s = μ(x)`:
//!
//! * `(1, ∞)`: exact, `K(t) = ∫_0^t μ`.
//! * `(p, ∞)`: `K(t) = min_λ ‖(s - λ)_+‖_p + tλ`, a one-dimensional convex
//!   problem solved by golden-section search.
//! * `(p, q)` finite: `min ‖g‖_p + t‖s - g‖_q` over the box `0 ≤ g ≤ s`,
//!   solved by projected gradient with Armijo backtracking.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algebra::{schatten_of_values, singular_profile, Operator, SingularProfile};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100_000;
const REL_TOL: f64 = 1e-7;

/// A compatible couple `(L_p, L_q)` with `1 ≤ p < q ≤ ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couple {
    p: f64,
    q: f64,
}

impl Couple {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && q > p && !p.is_infinite()) {
            return Err(Error::InvalidCouple { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `ρ` with `1/ρ = 1/p - 1/q`.
    pub fn rho(&self) -> f64 {
        1.0 / (1.0 / self.p - 1.0 / self.q)
    }
}

impl fmt::Display for Couple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(L{}, L{})", self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactL1Linf,
    ConvexOpt,
    Holmstedt,
}

/// A K-functional value with solver diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KValue {
    pub value: f64,
    pub method: Method,
    pub iterations: usize,
    /// `false` when the optimizer hit the iteration cap.
    pub converged: bool,
}

/// `K(t, x; L_p, L_q)`.
pub fn k_functional(x: &Operator, t: f64, couple: Couple) -> Result<KValue> {
    k_functional_profile(&singular_profile(x), t, couple)
}

pub fn k_functional_profile(profile: &SingularProfile, t: f64, couple: Couple) -> Result<KValue> {
    check_t(t)?;
    let s = profile.values();
    if couple.p == 1.0 && couple.q.is_infinite() {
        return Ok(KValue {
            value: profile.integral_to(t),
            method: Method::ExactL1Linf,
            iterations: 0,
            converged: true,
        });
    }
    if couple.q.is_infinite() {
        return Ok(level_search(s, t, couple.p));
    }
    Ok(projected_gradient(s, t, couple.p, couple.q))
}

/// `J(x, t) = max(‖x‖_p, t‖x‖_q)`.
pub fn j_functional(x: &Operator, t: f64, couple: Couple) -> Result<f64> {
    check_t(t)?;
    let prof = singular_profile(x);
    Ok(prof.schatten(couple.p)?.max(t * prof.schatten(couple.q)?))
}

/// Holmstedt's formula: `(∫_0^{t^ρ} μ^p)^{1/p} + t (∫_{t^ρ}^∞ μ^q)^{1/q}`.
/// Equivalent to `K`, not equal to it.
pub fn holmstedt_estimate(x: &Operator, t: f64, couple: Couple) -> Result<f64> {
    holmstedt_profile(&singular_profile(x), t, couple)
}

pub fn holmstedt_profile(profile: &SingularProfile, t: f64, couple: Couple) -> Result<f64> {
    check_t(t)?;
    let cut = t.powf(couple.rho());
    let (p, q) = (couple.p, couple.q);
    let mut head = 0.0;
    let mut tail = 0.0;
    let mut tail_sup: f64 = 0.0;
    for (i, &v) in profile.values().iter().enumerate() {
        let lo = i as f64;
        let hi = lo + 1.0;
        let head_w = (cut.min(hi) - lo).clamp(0.0, 1.0);
        let tail_w = 1.0 - head_w;
        head += head_w * v.powf(p);
        if tail_w > 0.0 {
            tail_sup = tail_sup.max(v);
            if q.is_finite() {
                tail += tail_w * v.powf(q);
            }
        }
    }
    let tail_norm = if q.is_finite() { tail.powf(1.0 / q) } else { tail_sup };
    Ok(head.powf(1.0 / p) + t * tail_norm)
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || t.is_infinite() {
        return Err(Error::ParameterRange(format!("t must be positive and finite, got {t}")));
    }
    Ok(())
}

fn lp(v: &[f64], p: f64) -> f64 {
    schatten_of_values(v, p).expect("p >= 1")
}

/// `min_{λ ∈ [0, max s]} ‖(s - λ)_+‖_p + tλ` for the `(p, ∞)` couple.
fn level_search(s: &[f64], t: f64, p: f64) -> KValue {
    let top = s.iter().copied().fold(0.0, f64::max);
    let obj = |lam: f64| {
        let g: Vec<f64> = s.iter().map(|v| (v - lam).max(0.0)).collect();
        lp(&g, p) + t * lam
    };
    let (lam, iterations) = golden_section_min(obj, 0.0, top, 1e-13 * top.max(1e-300));
    let value = obj(lam).min(obj(0.0)).min(obj(top));
    KValue {
        value,
        method: Method::ConvexOpt,
        iterations,
        converged: true,
    }
}

pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut it = 0;
    while (b - a) > tol && it < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        it += 1;
    }
    (0.5 * (a + b), it)
}

/// Gradient of `‖v‖_r` for `v ≥ 0`; zero at `v = 0`, which is a valid
/// subgradient there.
fn norm_gradient(v: &[f64], r: f64) -> Vec<f64> {
    let n = lp(v, r);
    if n == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|&x| (x / n).powf(r - 1.0)).collect()
}

fn projected_gradient(s: &[f64], t: f64, p: f64, q: f64) -> KValue {
    let obj = |g: &[f64]| {
        let h: Vec<f64> = s.iter().zip(g).map(|(a, b)| (a - b).max(0.0)).collect();
        lp(g, p) + t * lp(&h, q)
    };
    let grad = |g: &[f64]| {
        let h: Vec<f64> = s.iter().zip(g).map(|(a, b)| (a - b).max(0.0)).collect();
        let gp = norm_gradient(g, p);
        let gq = norm_gradient(&h, q);
        gp.iter().zip(&gq).map(|(a, b)| a - t * b).collect::<Vec<f64>>()
    };
    let project = |g: &mut [f64]| {
        for (gi, si) in g.iter_mut().zip(s) {
            *gi = gi.clamp(0.0, *si);
        }
    };

    // corner values: g = 0 and g = s
    let corner = (t * lp(s, q)).min(lp(s, p));
    let scale = s.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return KValue {
            value: 0.0,
            method: Method::ConvexOpt,
            iterations: 0,
            converged: true,
        };
    }

    let mut g: Vec<f64> = s.iter().map(|v| 0.5 * v).collect();
    let mut f = obj(&g);
    let mut d = grad(&g);
    let mut step = scale;
    let mut converged = false;
    let mut stalls = 0;
    let mut it = 0;
    while it < MAX_ITERATIONS {
        it += 1;
        // Armijo backtracking along the projection arc
        let mut trial_step = step;
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand: Vec<f64> = g.iter().zip(&d).map(|(x, y)| x - trial_step * y).collect();
            project(&mut cand);
            let dec: f64 = g
                .iter()
                .zip(&cand)
                .zip(&d)
                .map(|((x, c), y)| y * (x - c))
                .sum();
            let fc = obj(&cand);
            if fc <= f - 1e-4 * dec {
                accepted = Some((cand, fc));
                break;
            }
            trial_step *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            converged = true;
            break;
        };
        let moved: f64 = g.iter().zip(&cand).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let improvement = f - fc;
        let new_d = grad(&cand);
        // Barzilai–Borwein step for the next iteration
        let sy: f64 = cand
            .iter()
            .zip(&g)
            .zip(new_d.iter().zip(&d))
            .map(|((c, x), (nd, od))| (c - x) * (nd - od))
            .sum();
        let ss: f64 = cand.iter().zip(&g).map(|(c, x)| (c - x) * (c - x)).sum();
        step = if sy > 0.0 { (ss / sy).clamp(1e-12 * scale, 1e6 * scale) } else { trial_step * 2.0 };
        g = cand;
        f = fc;
        d = new_d;
        if moved <= 1e-13 * scale || improvement <= 1e-3 * REL_TOL * f.abs() {
            stalls += 1;
            if stalls >= 5 {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    KValue {
        value: f.min(corner),
        method: Method::ConvexOpt,
        iterations: it,
        converged,
    }
}

/// Samples of `t ↦ K(t)` for one operator.
#[derive(Clone, Debug, PartialEq)]
pub struct KFunctionalCurve {
    pub couple: Couple,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub all_converged: bool,
}

impl KFunctionalCurve {
    pub fn compute(x: &Operator, couple: Couple, t: &[f64], method: Method) -> Result<Self> {
        let prof = singular_profile(x);
        let mut values = Vec::with_capacity(t.len());
        let mut all_converged = true;
        let mut used = method;
        for &ti in t {
            match method {
                Method::Holmstedt => values.push(holmstedt_profile(&prof, ti, couple)?),
                _ => {
                    let k = k_functional_profile(&prof, ti, couple)?;
                    all_converged &= k.converged;
                    used = k.method;
                    values.push(k.value);
                }
            }
        }
        Ok(Self {
            couple,
            t: t.to_vec(),
            values,
            method: used,
            all_converged,
        })
    }

    /// Largest second difference `K(t_{j+1}) - 2K(t_j) + K(t_{j-1})` scaled
    /// to non-uniform spacing; nonpositive for a concave curve.
    pub fn max_concavity_defect(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for j in 1..self.t.len().saturating_sub(1) {
            let (t0, t1, t2) = (self.t[j - 1], self.t[j], self.t[j + 1]);
            let (k0, k1, k2) = (self.values[j - 1], self.values[j], self.values[j + 1]);
            let interp = k0 + (k2 - k0) * (t1 - t0) / (t2 - t0);
            worst = worst.max(interp - k1);
        }
        worst
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,k")?;
        for (t, k) in self.t.iter().zip(&self.values) {
            writeln!(w, "{t:e},{k:e}")?;
        }
        Ok(())
    }
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
