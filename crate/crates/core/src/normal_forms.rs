//! The four boundary normal forms of a flat `G`-connection near a torus.
//!
//! Each family is a constant-coefficient 1-form `cx dx + cy dy` on the torus
//! with commuting coefficients, together with an explicit developing map
//! `D: R² → G` satisfying `D^{-1} dD = cx dx + cy dy`. The torus coordinates
//! `(x, y)` are in turns: `(1, 0)` is the meridian and `(0, 1)` the longitude.
//!
//! Every coefficient matrix is linear in the parameters, which is what the
//! variation formulas rely on; [`coefficient_basis`] exposes that linear map.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ug21::{
    classify, diag, ComplexMatrix3, GElement, IsometryType, LieAlgebraElement, Tolerances,
    U21Matrix, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Elliptic,
    Loxodromic,
    #[serde(alias = "parabolic_case1", alias = "parabolic1")]
    ParabolicC1,
    #[serde(alias = "parabolic_case2", alias = "parabolic2")]
    ParabolicC2,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Elliptic,
        Family::Loxodromic,
        Family::ParabolicC1,
        Family::ParabolicC2,
    ];

    /// Parameter names in the order used by [`NormalFormConnection::params`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Elliptic => &["alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3"],
            Family::Loxodromic => &["theta1", "theta2", "tau1", "tau2", "u", "v"],
            Family::ParabolicC1 => &["alpha", "beta", "a", "b", "p", "q"],
            Family::ParabolicC2 => &["theta1", "theta2", "tau1", "tau2", "p", "q"],
        }
    }

    pub fn param_index(self, name: &str) -> Option<usize> {
        self.param_names().iter().position(|n| *n == name)
    }

    /// The isometry type the family is named after.
    pub fn nominal_type(self) -> IsometryType {
        match self {
            Family::Elliptic => IsometryType::Elliptic,
            Family::Loxodromic => IsometryType::Loxodromic,
            Family::ParabolicC1 | Family::ParabolicC2 => IsometryType::Parabolic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Elliptic => "elliptic",
            Family::Loxodromic => "loxodromic",
            Family::ParabolicC1 => "parabolic_c1",
            Family::ParabolicC2 => "parabolic_c2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormalFormConnection {
    Elliptic {
        alpha: [f64; 3],
        beta: [f64; 3],
    },
    Loxodromic {
        theta: [f64; 2],
        tau: [f64; 2],
        u: f64,
        v: f64,
    },
    ParabolicC1 {
        alpha: f64,
        beta: f64,
        a: f64,
        b: f64,
        p: f64,
        q: f64,
    },
    ParabolicC2 {
        theta: [f64; 2],
        tau: [f64; 2],
        p: f64,
        q: f64,
    },
}

/// Number of real parameters of every family.
pub const PARAM_COUNT: usize = 6;

impl NormalFormConnection {
    pub fn family(&self) -> Family {
        match self {
            NormalFormConnection::Elliptic { .. } => Family::Elliptic,
            NormalFormConnection::Loxodromic { .. } => Family::Loxodromic,
            NormalFormConnection::ParabolicC1 { .. } => Family::ParabolicC1,
            NormalFormConnection::ParabolicC2 { .. } => Family::ParabolicC2,
        }
    }

    pub fn zero(family: Family) -> Self {
        Self::from_params(family, &[0.0; PARAM_COUNT]).expect("six finite parameters")
    }

    pub fn from_params(family: Family, v: &[f64]) -> Result<Self> {
        if v.len() != PARAM_COUNT {
            return Err(Error::LengthMismatch {
                expected: PARAM_COUNT,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(match family {
            Family::Elliptic => NormalFormConnection::Elliptic {
                alpha: [v[0], v[1], v[2]],
                beta: [v[3], v[4], v[5]],
            },
            Family::Loxodromic => NormalFormConnection::Loxodromic {
                theta: [v[0], v[1]],
                tau: [v[2], v[3]],
                u: v[4],
                v: v[5],
            },
            Family::ParabolicC1 => NormalFormConnection::ParabolicC1 {
                alpha: v[0],
                beta: v[1],
                a: v[2],
                b: v[3],
                p: v[4],
                q: v[5],
            },
            Family::ParabolicC2 => NormalFormConnection::ParabolicC2 {
                theta: [v[0], v[1]],
                tau: [v[2], v[3]],
                p: v[4],
                q: v[5],
            },
        })
    }

    pub fn params(&self) -> [f64; PARAM_COUNT] {
        match *self {
            NormalFormConnection::Elliptic { alpha, beta } => {
                [alpha[0], alpha[1], alpha[2], beta[0], beta[1], beta[2]]
            }
            NormalFormConnection::Loxodromic { theta, tau, u, v } => {
                [theta[0], theta[1], tau[0], tau[1], u, v]
            }
            NormalFormConnection::ParabolicC1 {
                alpha,
                beta,
                a,
                b,
                p,
                q,
            } => [alpha, beta, a, b, p, q],
            NormalFormConnection::ParabolicC2 { theta, tau, p, q } => {
                [theta[0], theta[1], tau[0], tau[1], p, q]
            }
        }
    }

    /// Builds from named parameters; absent names default to zero.
    pub fn from_named(family: Family, named: &BTreeMap<String, f64>) -> Result<Self> {
        let mut v = [0.0; PARAM_COUNT];
        for (name, value) in named {
            let k = family.param_index(name).ok_or_else(|| Error::FamilyMismatch {
                family: family.to_string(),
                detail: format!("unknown parameter {name:?}"),
            })?;
            v[k] = *value;
        }
        Self::from_params(family, &v)
    }

    pub fn named(&self) -> BTreeMap<String, f64> {
        let family = self.family();
        family
            .param_names()
            .iter()
            .zip(self.params())
            .map(|(n, v)| (n.to_string(), v))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct NormalFormRepr {
    family: Family,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

impl Serialize for NormalFormConnection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NormalFormRepr {
            family: self.family(),
            params: self.named(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormalFormConnection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = NormalFormRepr::deserialize(d)?;
        NormalFormConnection::from_named(repr.family, &repr.params)
            .map_err(serde::de::Error::custom)
    }
}

fn cz(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit(r: usize, s: usize) -> ComplexMatrix3 {
    let mut m = ComplexMatrix3::zeros();
    m[(r, s)] = cz(1.0, 0.0);
    m
}

/// `2πi · diag(d)`.
fn two_pi_i_diag(d: [f64; 3]) -> ComplexMatrix3 {
    diag(cz(0.0, TAU * d[0]), cz(0.0, TAU * d[1]), cz(0.0, TAU * d[2]))
}

/// The nilpotent generator `[[0,1,0],[-1,0,1],[0,1,0]]` of the case-1
/// parabolic family.
fn nilpotent_e() -> ComplexMatrix3 {
    unit(0, 1) - unit(1, 0) + unit(1, 2) + unit(2, 1)
}

/// `[[-1,0,1],[0,0,0],[-1,0,1]]`; equals the square of [`nilpotent_e`].
fn nilpotent_g() -> ComplexMatrix3 {
    -unit(0, 0) + unit(0, 2) - unit(2, 0) + unit(2, 2)
}

/// `i G = [[-i,0,i],[0,0,0],[-i,0,i]]`.
fn nilpotent_f() -> ComplexMatrix3 {
    nilpotent_g() * cz(0.0, 1.0)
}

/// For each parameter (in [`Family::param_names`] order) the pair
/// `(∂cx/∂param, ∂cy/∂param)`.
pub fn coefficient_basis(family: Family) -> [(ComplexMatrix3, ComplexMatrix3); PARAM_COUNT] {
    let z = ComplexMatrix3::zeros();
    let e = |k: usize| {
        let mut d = [0.0; 3];
        d[k] = 1.0;
        two_pi_i_diag(d)
    };
    match family {
        Family::Elliptic => [(e(0), z), (e(1), z), (e(2), z), (z, e(0)), (z, e(1)), (z, e(2))],
        Family::Loxodromic => {
            let t1 = e(0);
            let t2 = e(1) + e(2);
            let h = unit(1, 2) + unit(2, 1);
            [(t1, z), (t2, z), (z, t1), (z, t2), (h, z), (z, h)]
        }
        Family::ParabolicC1 => {
            let s = two_pi_i_diag([1.0; 3]);
            let (ne, nf) = (nilpotent_e(), nilpotent_f());
            [(s, z), (z, s), (ne, z), (z, ne), (nf, z), (z, nf)]
        }
        Family::ParabolicC2 => {
            let t1 = two_pi_i_diag([1.0, 0.0, 1.0]);
            let t2 = e(1);
            let nf = nilpotent_f();
            [(t1, z), (t2, z), (z, t1), (z, t2), (nf, z), (z, nf)]
        }
    }
}

/// The `dx` and `dy` coefficient matrices of `D^{-1} dD`.
pub fn connection_coeffs(nf: &NormalFormConnection) -> (LieAlgebraElement, LieAlgebraElement) {
    let basis = coefficient_basis(nf.family());
    let mut cx = ComplexMatrix3::zeros();
    let mut cy = ComplexMatrix3::zeros();
    for ((bx, by), w) in basis.iter().zip(nf.params()) {
        cx += bx * cz(w, 0.0);
        cy += by * cz(w, 0.0);
    }
    (
        LieAlgebraElement::new_unchecked(cx),
        LieAlgebraElement::new_unchecked(cy),
    )
}

fn cis_turns(t: f64) -> C64 {
    C64::from_polar(1.0, TAU * t)
}

/// The developing map at torus coordinates `(x, y)`.
pub fn developing_map(nf: &NormalFormConnection, x: f64, y: f64) -> GElement {
    let (m, theta1, theta2) = match *nf {
        NormalFormConnection::Elliptic { alpha, beta } => {
            let w = [0, 1, 2].map(|k| alpha[k] * x + beta[k] * y);
            (
                diag(cis_turns(w[0]), cis_turns(w[1]), cis_turns(w[2])),
                TAU * (w[0] + w[1] + w[2]),
                TAU * w[2],
            )
        }
        NormalFormConnection::Loxodromic { theta, tau, u, v } => {
            let w1 = theta[0] * x + tau[0] * y;
            let w2 = theta[1] * x + tau[1] * y;
            let s = u * x + v * y;
            let e2 = cis_turns(w2);
            let (ch, sh) = (e2 * s.cosh(), e2 * s.sinh());
            let zero = cz(0.0, 0.0);
            let m = ComplexMatrix3::new(
                cis_turns(w1), zero, zero,
                zero, ch, sh,
                zero, sh, ch,
            );
            (m, TAU * w1 + 2.0 * TAU * w2, TAU * w2)
        }
        NormalFormConnection::ParabolicC1 {
            alpha,
            beta,
            a,
            b,
            p,
            q,
        } => {
            let phase = alpha * x + beta * y;
            let w = a * x + b * y;
            let z = p * x + q * y;
            let unipotent = ComplexMatrix3::identity()
                + nilpotent_e() * cz(w, 0.0)
                + nilpotent_g() * cz(w * w / 2.0, z);
            (
                unipotent * cis_turns(phase),
                3.0 * TAU * phase,
                (z / (1.0 + w * w / 2.0)).atan() + TAU * phase,
            )
        }
        NormalFormConnection::ParabolicC2 { theta, tau, p, q } => {
            let w1 = theta[0] * x + tau[0] * y;
            let w2 = theta[1] * x + tau[1] * y;
            let z = p * x + q * y;
            let e1 = cis_turns(w1);
            let zero = cz(0.0, 0.0);
            let iz = cz(0.0, z);
            let m = ComplexMatrix3::new(
                e1 * (cz(1.0, 0.0) - iz), zero, e1 * iz,
                zero, cis_turns(w2), zero,
                -e1 * iz, zero, e1 * (cz(1.0, 0.0) + iz),
            );
            (m, 2.0 * TAU * w1 + TAU * w2, TAU * w1 + z.atan())
        }
    };
    GElement::new_unchecked(U21Matrix::new_unchecked(m), theta1, theta2)
}

/// Boundary holonomy `(ρ(μ), ρ(λ)) = (D(1,0), D(0,1))`.
pub fn holonomy(nf: &NormalFormConnection) -> (GElement, GElement) {
    (developing_map(nf, 1.0, 0.0), developing_map(nf, 0.0, 1.0))
}

/// The family tag alongside the computed isometry type of the meridian and
/// longitude holonomy. Degenerate parameters (for example `u = v = 0` in the
/// loxodromic family) make the two disagree; that is reported, not an error.
#[derive(Clone, Debug)]
pub struct HolonomyReport {
    pub family: Family,
    pub mu: GElement,
    pub lambda: GElement,
    pub mu_type: IsometryType,
    pub lambda_type: IsometryType,
}

pub fn holonomy_report(nf: &NormalFormConnection, tol: &Tolerances) -> Result<HolonomyReport> {
    let (mu, lambda) = holonomy(nf);
    Ok(HolonomyReport {
        family: nf.family(),
        mu_type: classify(&mu.a, tol)?,
        lambda_type: classify(&lambda.a, tol)?,
        mu,
        lambda,
    })
}

/// Central finite-difference approximation of `(D^{-1} ∂D/∂x, D^{-1} ∂D/∂y)`
/// at `(x, y)` using the matrix part of the developing map.
pub fn developing_log_derivative(
    nf: &NormalFormConnection,
    x: f64,
    y: f64,
    step: f64,
) -> (ComplexMatrix3, ComplexMatrix3) {
    let d_inv = developing_map(nf, x, y).a.inverse().into_inner();
    let m = |x: f64, y: f64| *developing_map(nf, x, y).matrix();
    let h = cz(1.0 / (2.0 * step), 0.0);
    let dx = (m(x + step, y) - m(x - step, y)) * h;
    let dy = (m(x, y + step) - m(x, y - step)) * h;
    (d_inv * dx, d_inv * dy)
}
