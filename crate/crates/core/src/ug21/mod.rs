//! U(2,1) and its universal cover.
//!
//! U(2,1) is the group of complex 3×3 matrices `A` with `J A^H J = A^{-1}`,
//! `J = diag(1, 1, -1)`. Its universal cover `G` is modelled as triples
//! `(A, θ1, θ2)` with `θ1 ≡ arg det A` and `θ2 ≡ arg a33 (mod 2π)`; see
//! [`GElement`] for the group law.

mod algebra;
mod group;
pub mod json;
mod spectrum;

use std::ops::Mul;

use nalgebra::{Complex, Matrix3};

use crate::error::{Error, Result};

pub use algebra::{lie_exp, random_lie_algebra, random_u21, LieAlgebraElement, LIE_ALGEBRA_DIM};
pub use group::{g_inverse, g_multiply, g_project, lift_to_g, GElement};
pub use spectrum::{
    classify, eigenvalue_angles, eigenvalues, elliptic_decompose, is_reducible,
    EllipticDecomposition, IsometryType,
};

pub type C64 = Complex<f64>;
pub type ComplexMatrix3 = Matrix3<C64>;

/// Tolerances shared by the numeric layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Defining-relation residual for U(2,1) and u(2,1) membership.
    pub group: f64,
    /// Angle congruences of `G`, in radians.
    pub angle: f64,
    /// Eigenvalue moduli and singular-value rank decisions.
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            group: 1e-10,
            angle: 1e-9,
            classify: 1e-8,
        }
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `e^{iθ}`.
pub(crate) fn cis(theta: f64) -> C64 {
    Complex::from_polar(1.0, theta)
}

/// The Hermitian form `diag(1, 1, -1)`.
pub fn j_form() -> ComplexMatrix3 {
    ComplexMatrix3::from_diagonal(&nalgebra::Vector3::new(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)))
}

pub fn diag(d0: C64, d1: C64, d2: C64) -> ComplexMatrix3 {
    ComplexMatrix3::from_diagonal(&nalgebra::Vector3::new(d0, d1, d2))
}

/// `diag(e^{2πi f0}, e^{2πi f1}, e^{2πi f2})` for angles in turns.
pub fn diag_turns(f: [f64; 3]) -> ComplexMatrix3 {
    let tau = std::f64::consts::TAU;
    diag(cis(tau * f[0]), cis(tau * f[1]), cis(tau * f[2]))
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix3) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `|| J m^H J m - I ||_∞` (largest entry modulus).
pub fn check_u21(m: &ComplexMatrix3) -> f64 {
    let j = j_form();
    max_abs(&(j * m.adjoint() * j * m - ComplexMatrix3::identity()))
}

/// A matrix known to satisfy the U(2,1) relation within tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U21Matrix(ComplexMatrix3);

impl U21Matrix {
    pub fn new(m: ComplexMatrix3, tol_group: f64) -> Result<Self> {
        if !is_finite(&m) {
            return Err(Error::NonFinite);
        }
        let residual = check_u21(&m);
        if residual > tol_group || m[(2, 2)].norm() < 1.0 - tol_group {
            return Err(Error::NotU21 {
                residual,
                tol: tol_group,
            });
        }
        Ok(U21Matrix(m))
    }

    /// Wraps a matrix that is in U(2,1) by construction (products, exponentials,
    /// closed-form normal forms).
    pub fn new_unchecked(m: ComplexMatrix3) -> Self {
        U21Matrix(m)
    }

    pub fn identity() -> Self {
        U21Matrix(ComplexMatrix3::identity())
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix3 {
        self.0
    }

    /// `J A^H J`, the inverse in U(2,1).
    pub fn inverse(&self) -> U21Matrix {
        let j = j_form();
        U21Matrix(j * self.0.adjoint() * j)
    }

    pub fn conjugate_by(&self, p: &U21Matrix) -> U21Matrix {
        U21Matrix(p.0 * self.0 * p.inverse().0)
    }

    pub fn pow(&self, k: u32) -> U21Matrix {
        let mut acc = ComplexMatrix3::identity();
        let mut base = self.0;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        U21Matrix(acc)
    }

    pub fn residual(&self) -> f64 {
        check_u21(&self.0)
    }
}

impl Mul for U21Matrix {
    type Output = U21Matrix;
    fn mul(self, rhs: U21Matrix) -> U21Matrix {
        U21Matrix(self.0 * rhs.0)
    }
}

impl Mul<&U21Matrix> for &U21Matrix {
    type Output = U21Matrix;
    fn mul(self, rhs: &U21Matrix) -> U21Matrix {
        U21Matrix(self.0 * rhs.0)
    }
}
