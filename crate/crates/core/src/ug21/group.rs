use std::f64::consts::{PI, TAU};

use super::{ComplexMatrix3, Tolerances, U21Matrix};
use crate::error::{Error, Result};

/// An element `(A, θ1, θ2)` of the universal cover `G` of U(2,1).
///
/// `θ1 ≡ arg det A` and `θ2 ≡ arg a33` modulo 2π. The product is
///
/// ```text
/// (A, θ1, θ2)(B, φ1, φ2) = (AB, θ1 + φ1, θ2 + φ2 + arg(1 + (a31 b13 + a32 b23)/(a33 b33)))
/// ```
///
/// where the correction term uses the principal argument, which lies in
/// `(-π/2, π/2)` for genuine U(2,1) inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GElement {
    pub a: U21Matrix,
    pub theta1: f64,
    pub theta2: f64,
}

/// Distance from `x` to the nearest multiple of 2π.
pub(crate) fn dist_mod_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

impl GElement {
    /// Validates both angle congruences within `tol.angle`.
    pub fn new(a: U21Matrix, theta1: f64, theta2: f64, tol: &Tolerances) -> Result<Self> {
        let g = GElement { a, theta1, theta2 };
        let (d1, d2) = g.congruence_defects();
        if !(theta1.is_finite() && theta2.is_finite()) {
            return Err(Error::NonFinite);
        }
        if d1 > tol.angle {
            return Err(Error::InvalidGElement(format!(
                "theta1 = {theta1} differs from arg det by {d1:e} mod 2π"
            )));
        }
        if d2 > tol.angle {
            return Err(Error::InvalidGElement(format!(
                "theta2 = {theta2} differs from arg a33 by {d2:e} mod 2π"
            )));
        }
        Ok(g)
    }

    pub fn new_unchecked(a: U21Matrix, theta1: f64, theta2: f64) -> Self {
        GElement { a, theta1, theta2 }
    }

    pub fn identity() -> Self {
        GElement {
            a: U21Matrix::identity(),
            theta1: 0.0,
            theta2: 0.0,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        self.a.matrix()
    }

    /// Distances of `θ1 - arg det A` and `θ2 - arg a33` from 2πZ.
    pub fn congruence_defects(&self) -> (f64, f64) {
        let m = self.a.matrix();
        (
            dist_mod_tau(self.theta1 - m.determinant().arg()),
            dist_mod_tau(self.theta2 - m[(2, 2)].arg()),
        )
    }

    pub fn mul(&self, other: &GElement) -> Result<GElement> {
        g_multiply(self, other)
    }

    pub fn inverse(&self) -> Result<GElement> {
        g_inverse(self)
    }

    /// `self^k` for `k >= 0`, by repeated multiplication in `G`.
    pub fn pow(&self, k: u32) -> Result<GElement> {
        let mut acc = GElement::identity();
        for _ in 0..k {
            acc = g_multiply(&acc, self)?;
        }
        Ok(acc)
    }

    /// `self^k` for any integer `k`.
    pub fn powi(&self, k: i64) -> Result<GElement> {
        if k >= 0 {
            self.pow(k as u32)
        } else {
            self.inverse()?.pow(k.unsigned_abs() as u32)
        }
    }

    /// `p · self · p^{-1}`.
    pub fn conjugate_by(&self, p: &GElement) -> Result<GElement> {
        g_multiply(&g_multiply(p, self)?, &p.inverse()?)
    }

    /// Largest coordinate difference: matrix entries and both angles.
    pub fn distance(&self, other: &GElement) -> f64 {
        let dm = super::max_abs(&(self.matrix() - other.matrix()));
        dm.max((self.theta1 - other.theta1).abs())
            .max((self.theta2 - other.theta2).abs())
    }
}

/// `arg(1 + (a31 b13 + a32 b23)/(a33 b33))`, erroring when the argument leaves
/// the open right half-plane.
pub(crate) fn correction_term(a: &ComplexMatrix3, b: &ComplexMatrix3) -> Result<f64> {
    let z = super::c(1.0, 0.0)
        + (a[(2, 0)] * b[(0, 2)] + a[(2, 1)] * b[(1, 2)]) / (a[(2, 2)] * b[(2, 2)]);
    if !(z.re > 0.0) {
        return Err(Error::CorrectionBranch { real_part: z.re });
    }
    let arg = z.arg();
    debug_assert!(arg.abs() < PI / 2.0);
    Ok(arg)
}

pub fn g_multiply(g: &GElement, h: &GElement) -> Result<GElement> {
    let corr = correction_term(g.matrix(), h.matrix())?;
    Ok(GElement {
        a: g.a * h.a,
        theta1: g.theta1 + h.theta1,
        theta2: g.theta2 + h.theta2 + corr,
    })
}

/// Inverse fixed by the round trip `g · g^{-1} = (I, 0, 0)`.
pub fn g_inverse(g: &GElement) -> Result<GElement> {
    let inv = g.a.inverse();
    let corr = correction_term(g.matrix(), inv.matrix())?;
    Ok(GElement {
        a: inv,
        theta1: -g.theta1,
        theta2: -g.theta2 - corr,
    })
}

pub fn g_project(g: &GElement) -> U21Matrix {
    g.a
}

/// The lift with `θ1 = Arg det m + 2π k1` and `θ2 = Arg m33 + 2π k2` (principal
/// arguments in `(-π, π]`).
pub fn lift_to_g(m: &U21Matrix, k1: i64, k2: i64) -> GElement {
    let mat = m.matrix();
    GElement {
        a: *m,
        theta1: mat.determinant().arg() + TAU * k1 as f64,
        theta2: mat[(2, 2)].arg() + TAU * k2 as f64,
    }
}
