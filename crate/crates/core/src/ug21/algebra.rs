use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c, j_form, max_abs, ComplexMatrix3, U21Matrix};
use crate::error::{Error, Result};

/// Real dimension of u(2,1).
pub const LIE_ALGEBRA_DIM: usize = 9;

/// An element of u(2,1): `X^H J + J X = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieAlgebraElement(ComplexMatrix3);

impl LieAlgebraElement {
    pub fn new(x: ComplexMatrix3, tol_group: f64) -> Result<Self> {
        if !super::is_finite(&x) {
            return Err(Error::NonFinite);
        }
        let residual = Self::residual_of(&x);
        if residual > tol_group {
            return Err(Error::NotLieAlgebra {
                residual,
                tol: tol_group,
            });
        }
        Ok(LieAlgebraElement(x))
    }

    pub fn new_unchecked(x: ComplexMatrix3) -> Self {
        LieAlgebraElement(x)
    }

    pub fn zero() -> Self {
        LieAlgebraElement(ComplexMatrix3::zeros())
    }

    /// `|| X^H J + J X ||_∞`.
    pub fn residual_of(x: &ComplexMatrix3) -> f64 {
        let j = j_form();
        max_abs(&(x.adjoint() * j + j * x))
    }

    pub fn residual(&self) -> f64 {
        Self::residual_of(&self.0)
    }

    /// Builds `[[A, b], [b^H, i c]]` with `A` anti-Hermitian: coordinates are
    /// `(Im a11, Re a12, Im a12, Im a22, Re b1, Im b1, Re b2, Im b2, c)`.
    /// The last coordinate together with `a11, a22` spans the diagonal torus,
    /// which contains the centre `iI`.
    pub fn from_coords(v: &[f64; LIE_ALGEBRA_DIM]) -> Self {
        let a12 = c(v[1], v[2]);
        let b1 = c(v[4], v[5]);
        let b2 = c(v[6], v[7]);
        LieAlgebraElement(ComplexMatrix3::new(
            c(0.0, v[0]), a12, b1,
            -a12.conj(), c(0.0, v[3]), b2,
            b1.conj(), b2.conj(), c(0.0, v[8]),
        ))
    }

    pub fn coords(&self) -> [f64; LIE_ALGEBRA_DIM] {
        let x = &self.0;
        [
            x[(0, 0)].im,
            x[(0, 1)].re,
            x[(0, 1)].im,
            x[(1, 1)].im,
            x[(0, 2)].re,
            x[(0, 2)].im,
            x[(1, 2)].re,
            x[(1, 2)].im,
            x[(2, 2)].im,
        ]
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        LieAlgebraElement(self.0 * c(s, 0.0))
    }

    pub fn bracket(&self, other: &LieAlgebraElement) -> ComplexMatrix3 {
        self.0 * other.0 - other.0 * self.0
    }
}

/// Matrix exponential by scaling and squaring with a degree-18 Taylor kernel.
pub fn matrix_exp(x: &ComplexMatrix3) -> ComplexMatrix3 {
    let norm = x.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0u32;
    let mut scaled = *x;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        scaled *= c(0.5f64.powi(squarings as i32), 0.0);
    }
    let mut term = ComplexMatrix3::identity();
    let mut sum = ComplexMatrix3::identity();
    for k in 1..=18 {
        term = term * scaled * c(1.0 / k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

pub fn lie_exp(x: &LieAlgebraElement) -> U21Matrix {
    U21Matrix::new_unchecked(matrix_exp(&x.0))
}

/// Gaussian coordinates truncated to `[-scale, scale]`.
pub fn random_lie_algebra<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> LieAlgebraElement {
    let mut v = [0.0; LIE_ALGEBRA_DIM];
    for x in v.iter_mut() {
        let z: f64 = loop {
            let z: f64 = rng.sample(StandardNormal);
            if z.abs() <= 2.0 {
                break z;
            }
        };
        *x = 0.5 * scale * z;
    }
    LieAlgebraElement::from_coords(&v)
}

/// Deterministic in `seed`: the exponential of a random algebra element whose
/// coordinates have magnitude at most `scale`.
pub fn random_u21(seed: u64, scale: f64) -> U21Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lie_exp(&random_lie_algebra(&mut rng, scale))
}
