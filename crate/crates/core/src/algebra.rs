//! Finite-dimensional tracial algebra arithmetic.
//!
//! The ambient algebra is the full `D x D` complex matrix algebra with the
//! standard (unnormalized) trace. Operators are dense complex matrices;
//! functional calculus goes through the Hermitian eigendecomposition.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{PSD_CLAMP, RANK_REL};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// The matrix algebra `M_D` with trace `Tr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TracialAlgebra {
    dim: usize,
}

impl TracialAlgebra {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> Operator {
        Operator(Matrix::identity(self.dim, self.dim))
    }

    pub fn zero(&self) -> Operator {
        Operator(Matrix::zeros(self.dim, self.dim))
    }

    /// Real diagonal operator with the given entries.
    pub fn diagonal(&self, entries: &[f64]) -> Result<Operator> {
        self.check_len(entries.len())?;
        Ok(Operator::from_real_diagonal(entries))
    }

    /// Wraps a matrix, checking that it has the algebra's shape.
    pub fn operator(&self, m: Matrix) -> Result<Operator> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(Operator(m))
    }

    pub fn contains(&self, x: &Operator) -> bool {
        x.dim() == self.dim
    }

    pub fn trace(&self, x: &Operator) -> C64 {
        x.trace()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }
}

/// An element of a tracial matrix algebra.
#[derive(Clone, PartialEq)]
pub struct Operator(Matrix);

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({}x{})", self.0.nrows(), self.0.ncols())?;
        if self.dim() <= 4 {
            write!(f, " {}", self.0)?;
        }
        Ok(())
    }
}

impl Operator {
    /// Wraps a square matrix.
    ///
    /// Panics if `m` is not square.
    pub fn from_matrix(m: Matrix) -> Self {
        assert!(m.is_square(), "operators are square matrices");
        Self(m)
    }

    pub fn from_real_diagonal(entries: &[f64]) -> Self {
        let d = DVector::from_iterator(entries.len(), entries.iter().map(|&v| C64::new(v, 0.0)));
        Self(Matrix::from_diagonal(&d))
    }

    pub fn from_diagonal(entries: &[C64]) -> Self {
        Self(Matrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn matrix_mut(&mut self) -> &mut Matrix {
        &mut self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Operator {
        Operator(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `x* x`, the square of the column modulus `|x|`.
    pub fn modulus_sq(&self) -> Operator {
        Operator(self.0.ad_mul(&self.0))
    }

    /// `x x*`, the square of the row modulus `|x*|`.
    pub fn row_modulus_sq(&self) -> Operator {
        Operator(&self.0 * self.0.adjoint())
    }

    pub fn scale(&self, c: f64) -> Operator {
        Operator(self.0.map(|v| v * c))
    }

    pub fn scale_complex(&self, c: C64) -> Operator {
        Operator(self.0.map(|v| v * c))
    }

    /// `(x + x*) / 2`.
    pub fn hermitian_part(&self) -> Operator {
        Operator((&self.0 + self.0.adjoint()).map(|v| v * 0.5))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Frobenius norm, the Schatten 2-norm computed entrywise.
    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Commutator `xy - yx`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        Operator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Spectral decomposition of the Hermitian part.
    pub fn spectrum(&self) -> HermitianSpectrum {
        HermitianSpectrum::new(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().min()
    }

    /// Direct sum `self ⊕ other` as a block-diagonal operator.
    pub fn direct_sum(&self, other: &Operator) -> Operator {
        let (a, b) = (self.dim(), other.dim());
        let mut m = Matrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.0);
        m.view_mut((a, a), (b, b)).copy_from(&other.0);
        Operator(m)
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator(self.0 + rhs.0)
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.0 += &rhs.0;
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator(self.0 - rhs.0)
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator(self.0 * rhs.0)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-&self.0)
    }
}

/// Eigendecomposition `x = V diag(λ) V*` of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    values: Vec<f64>,
    vectors: Matrix,
}

impl HermitianSpectrum {
    /// Decomposes the Hermitian part of `x`.
    pub fn new(x: &Operator) -> Self {
        let h = x.hermitian_part().0;
        let eig = SymmetricEigen::new(h);
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest eigenvalue modulus.
    pub fn radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `V diag(f(λ)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Operator {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let c = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|v| *v *= c);
        }
        Operator(scaled * self.vectors.adjoint())
    }
}

/// Spectrum of a positive semidefinite operator, with small negative
/// eigenvalues clamped to zero.
#[derive(Clone, Debug)]
pub struct PsdSpectrum(HermitianSpectrum);

impl PsdSpectrum {
    /// Fails when an eigenvalue lies below the clamp tolerance, which scales
    /// with the spectral radius for operators of norm above one.
    pub fn new(x: &Operator) -> Result<Self> {
        let mut s = HermitianSpectrum::new(x);
        let tol = PSD_CLAMP * s.radius().max(1.0);
        let min = s.min();
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        s.values.iter_mut().for_each(|v| *v = v.max(0.0));
        Ok(Self(s))
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn max(&self) -> f64 {
        self.0.max().max(0.0)
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Operator {
        self.0.apply(f)
    }

    /// `x^a` for `a > 0`. Eigenvalues at or below `RANK_REL` times the
    /// largest one are treated as zero, so rounding noise in the kernel of a
    /// rank-deficient operator is not amplified by small powers.
    pub fn power(&self, a: f64) -> Operator {
        let tol = RANK_REL * self.max();
        self.apply(|t| if t > tol { t.powf(a) } else { 0.0 })
    }

    /// Moore–Penrose inverse: eigenvalues above `rank_tol` are inverted,
    /// the rest are zeroed.
    pub fn pseudo_inverse(&self, rank_tol: Option<f64>) -> Operator {
        let tol = rank_tol.unwrap_or_else(|| RANK_REL * self.max());
        self.apply(|t| if t > tol { 1.0 / t } else { 0.0 })
    }

    /// `x^a` on the support of `x` for any real `a`, zero off the support.
    pub fn support_power(&self, a: f64, rank_tol: Option<f64>) -> Operator {
        let tol = rank_tol.unwrap_or_else(|| RANK_REL * self.max());
        self.apply(|t| if t > tol { t.powf(a) } else { 0.0 })
    }

    /// Orthogonal projection onto the support.
    pub fn support(&self, rank_tol: Option<f64>) -> Operator {
        let tol = rank_tol.unwrap_or_else(|| RANK_REL * self.max());
        self.apply(|t| if t > tol { 1.0 } else { 0.0 })
    }
}

/// Applies `f` to the spectrum of the positive semidefinite operator `x`.
pub fn func_calc(x: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    Ok(PsdSpectrum::new(x)?.apply(f))
}

/// Moore–Penrose inverse of a positive semidefinite operator. The default
/// rank tolerance is `1e-12` times the largest eigenvalue.
pub fn pseudo_inverse(x: &Operator, rank_tol: Option<f64>) -> Result<Operator> {
    Ok(PsdSpectrum::new(x)?.pseudo_inverse(rank_tol))
}

/// `|x| = (x* x)^{1/2}`.
pub fn modulus(x: &Operator) -> Operator {
    PsdSpectrum::new(&x.modulus_sq())
        .expect("x* x is positive")
        .power(0.5)
}

/// Polar data `x = u |x|` with `u` unitary.
pub fn polar(x: &Operator) -> (Operator, Operator) {
    let svd = x.0.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V*");
    let mut v_scaled = v_t.adjoint();
    for (j, s) in svd.singular_values.iter().enumerate() {
        v_scaled.column_mut(j).iter_mut().for_each(|v| *v *= *s);
    }
    let abs = Operator(v_scaled * &v_t);
    (Operator(u * v_t), abs)
}

/// Non-increasing singular values of an operator, each of width one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    values: Vec<f64>,
}

impl SingularProfile {
    /// Builds a profile from nonnegative values in any order.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `∫_0^t μ_s ds` for the step profile.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let lo = i as f64;
            if t <= lo {
                break;
            }
            acc += v * (t - lo).min(1.0);
        }
        acc
    }

    pub fn schatten(&self, p: f64) -> Result<f64> {
        schatten_of_values(&self.values, p)
    }
}

/// Singular values of `x`, non-increasing.
pub fn singular_profile(x: &Operator) -> SingularProfile {
    SingularProfile::from_values(x.0.clone().singular_values().iter().copied().collect())
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `(Σ s_i^p)^{1/p}` with `p = ∞` giving the maximum. Values are taken in
/// absolute value.
pub fn schatten_of_values(values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(top);
    }
    let sum: f64 = values.iter().map(|v| (v.abs() / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// Schatten `p`-(quasi)norm. For `0 < p < 1` this is only a quasinorm.
pub fn schatten_norm(x: &Operator, p: f64) -> Result<f64> {
    check_exponent(p)?;
    singular_profile(x).schatten(p)
}

/// `‖a^{1/2}‖_p` for a positive semidefinite `a`, from its eigenvalues.
pub fn sqrt_schatten(a: &Operator, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let spec = PsdSpectrum::new(a)?;
    let roots: Vec<f64> = spec.values().iter().map(|v| v.sqrt()).collect();
    schatten_of_values(&roots, p)
}

/// Real trace `Re Tr(x)`.
pub fn real_trace(x: &Operator) -> f64 {
    x.trace().re
}
