//! Seeded random operators.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Operator, C64};

/// Ginibre matrix: i.i.d. complex Gaussian entries with `E|g_ij|^2 = scale^2`.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Operator {
    let s = scale * std::f64::consts::FRAC_1_SQRT_2;
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    });
    Operator::from_matrix(m)
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let g = ginibre(dim, 1.0, rng).into_matrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|v| *v *= phase);
    }
    Operator::from_matrix(q)
}

/// Positive definite operator `g* g / dim` for a Ginibre `g`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    ginibre(dim, 1.0, rng).modulus_sq().scale(1.0 / dim as f64)
}
