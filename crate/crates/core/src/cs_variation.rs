//! Variation of the Chern–Simons invariant along paths of normal-form
//! connections, and the shift caused by the large gauge transformation
//! `diag(e^{2πiθ}, e^{-2πiθ}, 1)` along a boundary circle.
//!
//! A path `A_t` is a family of boundary normal forms, one per `t ∈ [0, 1]`,
//! taken with zero `dt` component. On `T² × [0, 1]` the Chern–Simons form
//! `tr(A ∧ dA + ⅔ A ∧ A ∧ A)` reduces to `tr(cy ċx − cx ċy) dx∧dy∧dt`, and
//! `cs(A_1) − cs(A_0)` is its integral divided by `8π²`.
//!
//! Two independent evaluations are provided: [`cs_delta_closed`] applies the
//! per-family bilinear formulas in the parameters, and
//! [`cs_delta_quadrature`] integrates the matrix trace with Simpson's rule.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_forms::{coefficient_basis, connection_coeffs, Family, NormalFormConnection, PARAM_COUNT};
use crate::rational::Rational;
use crate::ug21::{c, ComplexMatrix3, U21Matrix};

/// Smallest number of samples accepted for a sampled parameter.
pub const MIN_SAMPLES: usize = 33;

/// Default number of Simpson panels.
pub const DEFAULT_PANELS: usize = 1024;

/// A polynomial `Σ c_k s^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, s: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &ck| acc * s + ck)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &ck)| k as f64 * ck)
                .collect(),
        )
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&0.0) - other.0.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }

    /// `p(c0 + c1 u)` as a polynomial in `u`.
    fn compose_affine(&self, c0: f64, c1: f64) -> Poly {
        let lin = Poly(vec![c0, c1]);
        let mut out = Poly(Vec::new());
        for &ck in self.0.iter().rev() {
            out = out.mul(&lin);
            if out.0.is_empty() {
                out.0.push(0.0);
            }
            out.0[0] += ck;
        }
        out
    }

    fn integral_unit(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, ck)| ck / (k + 1) as f64)
            .sum()
    }
}

/// One real parameter as a function of `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamCurve {
    /// `from + (to − from) t`.
    Linear { from: f64, to: f64 },
    /// Piecewise polynomial: on `[breaks[i], breaks[i+1]]` the value is
    /// `pieces[i](s)` with local coordinate `s ∈ [0, 1]`.
    Analytic { breaks: Vec<f64>, pieces: Vec<Poly> },
    /// Values at `N` uniformly spaced points `t_j = j/(N-1)`; derivatives by
    /// second-order finite differences, cubic Hermite interpolation between
    /// nodes.
    Samples(Vec<f64>),
}

impl ParamCurve {
    pub fn constant(value: f64) -> Self {
        Self::poly(vec![value])
    }

    pub fn linear(from: f64, to: f64) -> Self {
        ParamCurve::Linear { from, to }
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        ParamCurve::Analytic {
            breaks: vec![0.0, 1.0],
            pieces: vec![Poly(coeffs)],
        }
    }

    pub fn piecewise(breaks: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        let curve = ParamCurve::Analytic { breaks, pieces };
        curve.validate()?;
        Ok(curve)
    }

    pub fn samples(values: Vec<f64>) -> Result<Self> {
        let curve = ParamCurve::Samples(values);
        curve.validate()?;
        Ok(curve)
    }

    /// Samples `f` at `n` uniform points.
    pub fn sampled_from(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let last = (n.max(2) - 1) as f64;
        Self::samples((0..n).map(|j| f(j as f64 / last)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ParamCurve::Linear { from, to } => {
                if !(from.is_finite() && to.is_finite()) {
                    return Err(Error::InvalidPath("non-finite endpoint".into()));
                }
            }
            ParamCurve::Analytic { breaks, pieces } => {
                if pieces.is_empty() || breaks.len() != pieces.len() + 1 {
                    return Err(Error::InvalidPath(
                        "piecewise curve needs one more break than pieces".into(),
                    ));
                }
                if breaks[0] != 0.0 || *breaks.last().expect("nonempty") != 1.0 {
                    return Err(Error::InvalidPath("breaks must start at 0 and end at 1".into()));
                }
                if breaks.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidPath("breaks must be increasing".into()));
                }
                if pieces.iter().flat_map(|p| p.0.iter()).any(|x| !x.is_finite()) {
                    return Err(Error::InvalidPath("non-finite coefficient".into()));
                }
            }
            ParamCurve::Samples(v) => {
                if v.len() < MIN_SAMPLES {
                    return Err(Error::InvalidPath(format!(
                        "sampled parameter has {} points, need at least {MIN_SAMPLES}",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidPath("non-finite sample".into()));
                }
            }
        }
        Ok(())
    }

    fn locate(breaks: &[f64], t: f64) -> usize {
        let k = breaks.partition_point(|&b| b <= t);
        k.clamp(1, breaks.len() - 1) - 1
    }

    pub fn value(&self, t: f64) -> f64 {
        self.value_on(t, t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.derivative_on(t, t)
    }

    /// Value at `t` using the polynomial piece that contains `near`; this
    /// picks a one-sided limit at a break.
    fn value_on(&self, t: f64, near: f64) -> f64 {
        match self {
            ParamCurve::Linear { from, to } => from + (to - from) * t,
            ParamCurve::Analytic { breaks, pieces } => {
                let i = Self::locate(breaks, near);
                pieces[i].eval((t - breaks[i]) / (breaks[i + 1] - breaks[i]))
            }
            ParamCurve::Samples(v) => hermite(v, t).0,
        }
    }

    fn derivative_on(&self, t: f64, near: f64) -> f64 {
        match self {
            ParamCurve::Linear { from, to } => to - from,
            ParamCurve::Analytic { breaks, pieces } => {
                let i = Self::locate(breaks, near);
                let len = breaks[i + 1] - breaks[i];
                pieces[i].derivative().eval((t - breaks[i]) / len) / len
            }
            ParamCurve::Samples(v) => hermite(v, t).1,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, ParamCurve::Samples(_))
    }

    /// `t ↦ self(1 − t)`.
    pub fn reversed(&self) -> ParamCurve {
        match self {
            ParamCurve::Linear { from, to } => ParamCurve::Linear { from: *to, to: *from },
            ParamCurve::Analytic { breaks, pieces } => ParamCurve::Analytic {
                breaks: breaks.iter().rev().map(|b| 1.0 - b).collect(),
                pieces: pieces.iter().rev().map(|p| p.compose_affine(1.0, -1.0)).collect(),
            },
            ParamCurve::Samples(v) => ParamCurve::Samples(v.iter().rev().copied().collect()),
        }
    }

    /// The same curve as a piecewise polynomial, if it is not sampled.
    pub fn to_analytic(&self) -> Option<ParamCurve> {
        match self {
            ParamCurve::Linear { from, to } => Some(Self::poly(vec![*from, to - from])),
            ParamCurve::Analytic { .. } => Some(self.clone()),
            ParamCurve::Samples(_) => None,
        }
    }

    /// Runs `first` on `[0, ½]` and `second` on `[½, 1]`; both must be analytic.
    pub fn concat(first: &ParamCurve, second: &ParamCurve) -> Result<ParamCurve> {
        let not_analytic = || Error::InvalidPath("only analytic curves can be concatenated".into());
        let first = first.to_analytic().ok_or_else(not_analytic)?;
        let second = second.to_analytic().ok_or_else(not_analytic)?;
        match (&first, &second) {
            (
                ParamCurve::Analytic {
                    breaks: b1,
                    pieces: p1,
                },
                ParamCurve::Analytic {
                    breaks: b2,
                    pieces: p2,
                },
            ) => {
                let mut breaks: Vec<f64> = b1.iter().map(|b| b / 2.0).collect();
                breaks.extend(b2.iter().skip(1).map(|b| 0.5 + b / 2.0));
                let pieces = p1.iter().chain(p2.iter()).cloned().collect();
                ParamCurve::piecewise(breaks, pieces)
            }
            _ => Err(Error::InvalidPath("only analytic curves can be concatenated".into())),
        }
    }
}

/// Node derivatives of uniformly spaced samples with spacing `h`.
fn node_derivatives(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let h = 1.0 / (n - 1) as f64;
    (0..n)
        .map(|j| {
            if j == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if j == n - 1 {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[j + 1] - v[j - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Cubic Hermite value and derivative at `t`.
fn hermite(v: &[f64], t: f64) -> (f64, f64) {
    let n = v.len();
    let h = 1.0 / (n - 1) as f64;
    let pos = (t / h).clamp(0.0, (n - 1) as f64);
    let j = (pos.floor() as usize).min(n - 2);
    let s = pos - j as f64;
    let d = node_derivatives(v);
    let (y0, y1, m0, m1) = (v[j], v[j + 1], d[j] * h, d[j + 1] * h);
    if s == 0.0 {
        return (y0, d[j]);
    }
    let s2 = s * s;
    let s3 = s2 * s;
    let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * m1;
    let deriv = ((6.0 * s2 - 6.0 * s) * y0
        + (3.0 * s2 - 4.0 * s + 1.0) * m0
        + (-6.0 * s2 + 6.0 * s) * y1
        + (3.0 * s2 - 2.0 * s) * m1)
        / h;
    (value, deriv)
}

/// A path of normal forms of one family; each parameter is a [`ParamCurve`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionPath {
    pub family: Family,
    pub params: [ParamCurve; PARAM_COUNT],
}

impl ConnectionPath {
    pub fn new(family: Family, params: [ParamCurve; PARAM_COUNT]) -> Result<Self> {
        let path = ConnectionPath { family, params };
        path.validate()?;
        Ok(path)
    }

    /// Every parameter constant at the given values.
    pub fn constant(nf: &NormalFormConnection) -> Self {
        ConnectionPath {
            family: nf.family(),
            params: nf.params().map(ParamCurve::constant),
        }
    }

    /// Straight line between two normal forms of the same family.
    pub fn linear(from: &NormalFormConnection, to: &NormalFormConnection) -> Result<Self> {
        if from.family() != to.family() {
            return Err(Error::FamilyMismatch {
                family: from.family().to_string(),
                detail: format!("endpoint is {}", to.family()),
            });
        }
        let (a, b) = (from.params(), to.params());
        Ok(ConnectionPath {
            family: from.family(),
            params: std::array::from_fn(|k| ParamCurve::linear(a[k], b[k])),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut sample_len = None;
        for p in &self.params {
            p.validate()?;
            if let ParamCurve::Samples(v) = p {
                match sample_len {
                    None => sample_len = Some(v.len()),
                    Some(n) if n != v.len() => {
                        return Err(Error::InvalidPath(
                            "sampled parameters must share one grid".into(),
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> NormalFormConnection {
        let v: Vec<f64> = self.params.iter().map(|p| p.value(t)).collect();
        NormalFormConnection::from_params(self.family, &v).expect("validated path")
    }

    pub fn derivative_at(&self, t: f64) -> [f64; PARAM_COUNT] {
        std::array::from_fn(|k| self.params[k].derivative(t))
    }

    /// Union of the break points of all analytic parameters.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut cuts = vec![0.0, 1.0];
        for p in &self.params {
            if let ParamCurve::Analytic { breaks, .. } = p {
                cuts.extend_from_slice(breaks);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }

    pub fn reversed(&self) -> Self {
        ConnectionPath {
            family: self.family,
            params: std::array::from_fn(|k| self.params[k].reversed()),
        }
    }

    pub fn concat(&self, next: &ConnectionPath) -> Result<Self> {
        if self.family != next.family {
            return Err(Error::FamilyMismatch {
                family: self.family.to_string(),
                detail: format!("cannot concatenate with {}", next.family),
            });
        }
        let mut params = Vec::with_capacity(PARAM_COUNT);
        for k in 0..PARAM_COUNT {
            params.push(ParamCurve::concat(&self.params[k], &next.params[k])?);
        }
        Ok(ConnectionPath {
            family: self.family,
            params: params.try_into().expect("six curves"),
        })
    }

    fn sample_grid(&self) -> Option<usize> {
        self.params.iter().find_map(|p| match p {
            ParamCurve::Samples(v) => Some(v.len()),
            _ => None,
        })
    }
}

/// The closed formulas as weighted sums `Σ w · ∫(f ġ − ḟ g) dt` over
/// parameter pairs `(f, g)` (indices into [`Family::param_names`]).
fn bilinear_terms(family: Family) -> &'static [(usize, usize, f64)] {
    const QUARTER_PI_SQ_INV: f64 = 1.0 / (4.0 * PI * PI);
    match family {
        Family::Elliptic => &[(0, 3, 0.5), (1, 4, 0.5), (2, 5, 0.5)],
        // u̇v − uv̇ = −(u v̇ − u̇ v)
        Family::Loxodromic => &[(0, 2, 0.5), (1, 3, 1.0), (4, 5, -QUARTER_PI_SQ_INV)],
        Family::ParabolicC1 => &[(0, 1, 1.5)],
        Family::ParabolicC2 => &[(0, 2, 1.0), (1, 3, 0.5)],
    }
}

/// `∫_0^1 (f ġ − ḟ g) dt` for two piecewise polynomials, exactly.
fn pair_integral_analytic(f: &ParamCurve, g: &ParamCurve) -> f64 {
    if let (ParamCurve::Linear { from: f0, to: f1 }, ParamCurve::Linear { from: g0, to: g1 }) = (f, g) {
        return f0 * g1 - f1 * g0;
    }
    let (f, g) = (
        f.to_analytic().expect("not sampled"),
        g.to_analytic().expect("not sampled"),
    );
    let (ParamCurve::Analytic { breaks: bf, pieces: pf }, ParamCurve::Analytic { breaks: bg, pieces: pg }) =
        (&f, &g)
    else {
        unreachable!("callers pass analytic curves")
    };
    let mut cuts: Vec<f64> = bf.iter().chain(bg.iter()).copied().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let restrict = |breaks: &[f64], pieces: &[Poly], a: f64, b: f64| {
        let i = ParamCurve::locate(breaks, 0.5 * (a + b));
        let len = breaks[i + 1] - breaks[i];
        pieces[i].compose_affine((a - breaks[i]) / len, (b - a) / len)
    };
    cuts.windows(2)
        .map(|w| {
            // The integrand is invariant under reparametrization, so each
            // subinterval is integrated in its own unit coordinate.
            let fu = restrict(bf, pf, w[0], w[1]);
            let gu = restrict(bg, pg, w[0], w[1]);
            fu.mul(&gu.derivative()).sub(&fu.derivative().mul(&gu)).integral_unit()
        })
        .sum()
}

/// Composite Simpson weights on `m + 1` uniform nodes over `[0, 1]`; an odd
/// panel count ends with a three-eighths rule over the last three panels.
fn simpson_weights(m: usize) -> Vec<f64> {
    let h = 1.0 / m as f64;
    let mut w = vec![0.0; m + 1];
    let simpson_panels = if m.is_multiple_of(2) { m } else { m - 3 };
    for j in (0..simpson_panels).step_by(2) {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
    }
    if m % 2 == 1 {
        let s = simpson_panels;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + k] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// `∫(f ġ − ḟ g)` on the sample grid of `n` nodes, with analytic curves
/// evaluated at the same nodes.
fn pair_integral_sampled(f: &ParamCurve, g: &ParamCurve, n: usize) -> f64 {
    let weights = simpson_weights(n - 1);
    let last = (n - 1) as f64;
    let (fd, gd) = (grid_derivatives(f, n), grid_derivatives(g, n));
    (0..n)
        .map(|j| {
            let t = j as f64 / last;
            weights[j] * (f.value(t) * gd[j] - fd[j] * g.value(t))
        })
        .sum()
}

fn grid_derivatives(p: &ParamCurve, n: usize) -> Vec<f64> {
    match p {
        ParamCurve::Samples(v) => node_derivatives(v),
        _ => (0..n).map(|j| p.derivative(j as f64 / (n - 1) as f64)).collect(),
    }
}

/// `cs(A_1) − cs(A_0)` from the closed per-family formulas, unreduced.
/// Linear and polynomial parameters are integrated exactly; sampled
/// parameters by Simpson's rule on their grid.
pub fn cs_delta_closed(path: &ConnectionPath) -> Result<f64> {
    path.validate()?;
    let grid = path.sample_grid();
    let mut total = 0.0;
    for &(i, j, w) in bilinear_terms(path.family) {
        let (f, g) = (&path.params[i], &path.params[j]);
        let integral = if f.is_sampled() || g.is_sampled() {
            pair_integral_sampled(f, g, grid.expect("a curve is sampled"))
        } else {
            pair_integral_analytic(f, g)
        };
        total += w * integral;
    }
    Ok(total)
}

/// The `dx∧dy∧dt` coefficient of `tr(A ∧ dA + ⅔ A ∧ A ∧ A)` at time `t`,
/// which equals `tr(cy ċx − cx ċy)`.
pub fn integrand_coefficient(path: &ConnectionPath, t: f64) -> f64 {
    integrand_on(path, t, t)
}

fn integrand_on(path: &ConnectionPath, t: f64, near: f64) -> f64 {
    let values: Vec<f64> = path.params.iter().map(|p| p.value_on(t, near)).collect();
    let nf = NormalFormConnection::from_params(path.family, &values).expect("validated path");
    let (cx, cy) = connection_coeffs(&nf);
    let basis = coefficient_basis(path.family);
    let mut dcx = ComplexMatrix3::zeros();
    let mut dcy = ComplexMatrix3::zeros();
    for ((bx, by), p) in basis.iter().zip(&path.params) {
        let r = p.derivative_on(t, near);
        dcx += bx * c(r, 0.0);
        dcy += by * c(r, 0.0);
    }
    (cy.matrix() * dcx - cx.matrix() * dcy).trace().re
}

/// `cs(A_1) − cs(A_0)` by composite Simpson quadrature of the Chern–Simons
/// integrand over `t` with `n` panels (`n` even, at least 2). The torus
/// factor integrates to 1 because the integrand is constant in `(x, y)`.
///
/// Piecewise parameters are integrated segment by segment, with the panels
/// shared out in proportion to segment length, so that kinks at break points
/// never fall inside a Simpson panel.
pub fn cs_delta_quadrature(path: &ConnectionPath, n: usize) -> Result<f64> {
    path.validate()?;
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidPath(format!("panel count {n} must be even and at least 2")));
    }
    let cuts = path.breakpoints();
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let m = if cuts.len() == 2 {
            n
        } else {
            (2.0 * (n as f64 * len / 2.0).round()).max(2.0) as usize
        };
        let weights = simpson_weights(m);
        let mid = 0.5 * (a + b);
        sum += len
            * (0..=m)
                .map(|j| weights[j] * integrand_on(path, a + len * j as f64 / m as f64, mid))
                .sum::<f64>();
    }
    Ok(sum / (8.0 * PI * PI))
}

/// `m(β1 − β2)/2 − n(α1 − α2)/2`: the change of `cs` for an elliptic normal
/// form under the gauge transformation winding `m` times along the meridian
/// and `n` times along the longitude.
pub fn gauge_shift_closed(m: i64, n: i64, alpha: [f64; 3], beta: [f64; 3]) -> f64 {
    m as f64 * (beta[0] - beta[1]) / 2.0 - n as f64 * (alpha[0] - alpha[1]) / 2.0
}

/// Exact counterpart of [`gauge_shift_closed`].
pub fn gauge_shift_exact(m: i64, n: i64, alpha: &[Rational; 3], beta: &[Rational; 3]) -> Rational {
    (&beta[0] - &beta[1]) * Rational::new(m, 2) - (&alpha[0] - &alpha[1]) * Rational::new(n, 2)
}

/// `h(e^{2πiθ}) = diag(e^{2πiθ}, e^{-2πiθ}, 1)`.
fn winding_gauge(x: f64) -> U21Matrix {
    U21Matrix::new_unchecked(crate::ug21::diag_turns([x, -x, 0.0]))
}

/// `(1/8π²) ∫_T tr(g^{-1} A g ∧ g^{-1} dg)` for `g(x, y) = h(e^{2πix})`,
/// evaluated on an `n_grid × n_grid` midpoint grid with fourth-order finite
/// differences for `dg`. For an elliptic form this is `(β1 − β2)/2`.
pub fn gauge_shift_boundary_integral(nf: &NormalFormConnection, n_grid: usize) -> Result<f64> {
    if !matches!(nf, NormalFormConnection::Elliptic { .. }) {
        return Err(Error::FamilyMismatch {
            family: nf.family().to_string(),
            detail: "the boundary integral is defined for elliptic forms".into(),
        });
    }
    if n_grid < 16 {
        return Err(Error::InvalidArgument(format!("n_grid {n_grid} must be at least 16")));
    }
    let (cx, cy) = connection_coeffs(nf);
    let step = 1e-3;
    let g_of = |x: f64, _y: f64| winding_gauge(x).into_inner();
    let fd = |f: &dyn Fn(f64) -> ComplexMatrix3, s: f64| {
        (f(s - 2.0 * step) - f(s - step) * c(8.0, 0.0) + f(s + step) * c(8.0, 0.0)
            - f(s + 2.0 * step))
            * c(1.0 / (12.0 * step), 0.0)
    };
    let h = 1.0 / n_grid as f64;
    let mut total = 0.0;
    for i in 0..n_grid {
        let x = (i as f64 + 0.5) * h;
        for j in 0..n_grid {
            let y = (j as f64 + 0.5) * h;
            let g = U21Matrix::new_unchecked(g_of(x, y));
            let g_inv = g.inverse().into_inner();
            let gm = g.into_inner();
            let px = g_inv * cx.matrix() * gm;
            let py = g_inv * cy.matrix() * gm;
            let qx = g_inv * fd(&|s| g_of(s, y), x);
            let qy = g_inv * fd(&|s| g_of(x, s), y);
            total += (px * qy - py * qx).trace().re;
        }
    }
    Ok(total * h * h / (8.0 * PI * PI))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CurveRepr {
    Constant { value: f64 },
    Linear { from: f64, to: f64 },
    Poly { coeffs: Vec<f64> },
    Piecewise { breaks: Vec<f64>, pieces: Vec<CurveRepr> },
    Samples { values: Vec<f64> },
}

impl CurveRepr {
    fn into_curve(self) -> Result<ParamCurve> {
        let curve = match self {
            CurveRepr::Constant { value } => ParamCurve::constant(value),
            CurveRepr::Linear { from, to } => ParamCurve::Linear { from, to },
            CurveRepr::Poly { coeffs } => ParamCurve::poly(coeffs),
            CurveRepr::Samples { values } => ParamCurve::Samples(values),
            CurveRepr::Piecewise { breaks, pieces } => {
                let mut polys = Vec::with_capacity(pieces.len());
                for p in pieces {
                    match p.into_curve()?.to_analytic() {
                        Some(ParamCurve::Analytic { pieces, .. }) if pieces.len() == 1 => {
                            polys.push(pieces.into_iter().next().expect("one piece"))
                        }
                        _ => {
                            return Err(Error::InvalidPath(
                                "pieces must be constant, linear or poly".into(),
                            ))
                        }
                    }
                }
                ParamCurve::Analytic {
                    breaks,
                    pieces: polys,
                }
            }
        };
        curve.validate()?;
        Ok(curve)
    }

    fn from_curve(curve: &ParamCurve) -> Self {
        match curve {
            ParamCurve::Samples(v) => CurveRepr::Samples { values: v.clone() },
            ParamCurve::Linear { from, to } => CurveRepr::Linear {
                from: *from,
                to: *to,
            },
            ParamCurve::Analytic { pieces, .. } if pieces.len() == 1 => CurveRepr::Poly {
                coeffs: pieces[0].0.clone(),
            },
            ParamCurve::Analytic { breaks, pieces } => CurveRepr::Piecewise {
                breaks: breaks.clone(),
                pieces: pieces
                    .iter()
                    .map(|p| CurveRepr::Poly { coeffs: p.0.clone() })
                    .collect(),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    family: Family,
    #[serde(default)]
    params: BTreeMap<String, CurveRepr>,
}

impl Serialize for ConnectionPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PathRepr {
            family: self.family,
            params: self
                .family
                .param_names()
                .iter()
                .zip(&self.params)
                .map(|(n, p)| (n.to_string(), CurveRepr::from_curve(p)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConnectionPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PathRepr::deserialize(d)?;
        let family = repr.family;
        let mut params: [ParamCurve; PARAM_COUNT] =
            std::array::from_fn(|_| ParamCurve::constant(0.0));
        for (name, curve) in repr.params {
            let k = family.param_index(&name).ok_or_else(|| {
                D::Error::custom(Error::FamilyMismatch {
                    family: family.to_string(),
                    detail: format!("unknown parameter {name:?}"),
                })
            })?;
            params[k] = curve.into_curve().map_err(D::Error::custom)?;
        }
        ConnectionPath::new(family, params).map_err(D::Error::custom)
    }
}

/// A path whose parameters are polynomials of the given degree with
/// coefficients uniform in `[-scale, scale]`; a test-data generator.
pub fn random_polynomial_path<R: Rng + ?Sized>(
    family: Family,
    degree: usize,
    scale: f64,
    rng: &mut R,
) -> ConnectionPath {
    ConnectionPath {
        family,
        params: std::array::from_fn(|_| {
            ParamCurve::poly((0..=degree).map(|_| rng.random_range(-scale..=scale)).collect())
        }),
    }
}

/// Unreduced variation for a linear elliptic path, `½ Σ (α_k(0) β_k(1) − α_k(1) β_k(0))`,
/// in exact arithmetic.
pub fn elliptic_linear_variation_exact(
    from: (&[Rational; 3], &[Rational; 3]),
    to: (&[Rational; 3], &[Rational; 3]),
) -> Rational {
    let (a0, b0) = from;
    let (a1, b1) = to;
    (0..3)
        .map(|k| &a0[k] * &b1[k] - &a1[k] * &b0[k])
        .sum::<Rational>()
        * Rational::new(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn elliptic_path(alpha1: ParamCurve, beta1: ParamCurve) -> ConnectionPath {
        let z = || ParamCurve::constant(0.0);
        ConnectionPath::new(Family::Elliptic, [alpha1, z(), z(), beta1, z(), z()]).unwrap()
    }

    #[test]
    fn constant_paths_have_zero_variation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in Family::ALL {
            let v: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let path = ConnectionPath::constant(&NormalFormConnection::from_params(f, &v).unwrap());
            assert_eq!(cs_delta_closed(&path).unwrap(), 0.0);
            assert!(cs_delta_quadrature(&path, 64).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn elliptic_example() {
        let path = elliptic_path(ParamCurve::linear(0.0, 1.0), ParamCurve::constant(1.0));
        assert_eq!(cs_delta_closed(&path).unwrap(), -0.5);
        assert!((cs_delta_quadrature(&path, 1024).unwrap() + 0.5).abs() < 1e-10);
    }

    #[test]
    fn loxodromic_example() {
        let z = || ParamCurve::constant(0.0);
        let path = ConnectionPath::new(
            Family::Loxodromic,
            [z(), z(), z(), z(), ParamCurve::linear(0.0, 1.0), ParamCurve::constant(1.0)],
        )
        .unwrap();
        let expected = 1.0 / (4.0 * PI * PI);
        assert!((cs_delta_closed(&path).unwrap() - expected).abs() < 1e-15);
        assert!((cs_delta_quadrature(&path, 1024).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn parabolic_c1_with_non_polynomial_parameters() {
        let n = 257;
        let path = ConnectionPath::new(
            Family::ParabolicC1,
            [
                ParamCurve::linear(0.0, 1.0),
                ParamCurve::constant(1.0),
                ParamCurve::sampled_from(n, |t| (PI * t).sin()).unwrap(),
                ParamCurve::constant(0.0),
                ParamCurve::poly(vec![0.0, 0.0, 1.0]),
                ParamCurve::constant(0.0),
            ],
        )
        .unwrap();
        let closed = cs_delta_closed(&path).unwrap();
        assert!((closed + 1.5).abs() < 1e-12);
        assert!((cs_delta_quadrature(&path, 1024).unwrap() - closed).abs() < 1e-8);
    }

    #[test]
    fn polynomial_exact_integral() {
        // f = t², g = t: ∫(f ġ − ḟ g) = ∫(t² − 2t²) = −1/3.
        let path = elliptic_path(ParamCurve::poly(vec![0.0, 0.0, 1.0]), ParamCurve::linear(0.0, 1.0));
        assert!((cs_delta_closed(&path).unwrap() + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn reversal_and_concatenation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in Family::ALL {
            let mut endpoint = || {
                let v: Vec<f64> = (0..PARAM_COUNT).map(|_| rng.random_range(-1.0..1.0)).collect();
                NormalFormConnection::from_params(f, &v).unwrap()
            };
            let (from, to) = (endpoint(), endpoint());
            let a = ConnectionPath::linear(&from, &to).unwrap();
            let mut b = random_polynomial_path(f, 3, 1.0, &mut rng);
            // Start b where a ends so the concatenation is continuous.
            for k in 0..PARAM_COUNT {
                let gap = a.params[k].value(1.0) - b.params[k].value(0.0);
                if let ParamCurve::Analytic { pieces, .. } = &mut b.params[k] {
                    pieces[0].0[0] += gap;
                }
            }
            let da = cs_delta_closed(&a).unwrap();
            assert_eq!(cs_delta_closed(&a.reversed()).unwrap(), -da);
            let db = cs_delta_closed(&b).unwrap();
            assert!((cs_delta_closed(&b.reversed()).unwrap() + db).abs() < 1e-12);
            let ab = a.concat(&b).unwrap();
            assert!((cs_delta_closed(&ab).unwrap() - da - db).abs() < 1e-10);
            assert!((cs_delta_quadrature(&ab, 1024).unwrap() - da - db).abs() < 1e-8);
        }
    }

    #[test]
    fn integrand_matches_per_family_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let four_pi_sq = 4.0 * PI * PI;
        for f in Family::ALL {
            let path = random_polynomial_path(f, 3, 1.0, &mut rng);
            for j in 0..=16 {
                let t = j as f64 / 16.0;
                let v = path.at(t).params();
                let d = path.derivative_at(t);
                let w = |i: usize, k: usize| v[i] * d[k] - d[i] * v[k];
                let expected = match f {
                    Family::Elliptic => four_pi_sq * (w(0, 3) + w(1, 4) + w(2, 5)),
                    Family::Loxodromic => {
                        four_pi_sq * w(0, 2) + 2.0 * four_pi_sq * w(1, 3)
                            + 2.0 * (d[4] * v[5] - v[4] * d[5])
                    }
                    Family::ParabolicC1 => 3.0 * four_pi_sq * w(0, 1),
                    Family::ParabolicC2 => 2.0 * four_pi_sq * w(0, 2) + four_pi_sq * w(1, 3),
                };
                let got = integrand_coefficient(&path, t);
                assert!((got - expected).abs() < 1e-10 * (1.0 + expected.abs()), "{f} t={t}");
            }
        }
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in Family::ALL {
            let path = random_polynomial_path(f, 3, 1.0, &mut rng);
            let exact = cs_delta_closed(&path).unwrap();
            let e1 = (cs_delta_quadrature(&path, 8).unwrap() - exact).abs();
            let e2 = (cs_delta_quadrature(&path, 16).unwrap() - exact).abs();
            assert!(e1 / e2 >= 8.0, "{f}: {e1:e} -> {e2:e}");
        }
    }

    #[test]
    fn sampled_curves_interpolate() {
        let curve = ParamCurve::sampled_from(65, |t| t * t * t).unwrap();
        assert_eq!(curve.value(0.5), 0.125);
        assert!((curve.value(0.3) - 0.027).abs() < 1e-5);
        assert!((curve.derivative(0.3) - 0.27).abs() < 1e-3);
        assert!(ParamCurve::sampled_from(20, |t| t).is_err());
    }

    #[test]
    fn simpson_weights_integrate_cubics() {
        for m in [2, 3, 5, 8, 33] {
            let w = simpson_weights(m);
            let s: f64 = (0..=m).map(|j| w[j] * (j as f64 / m as f64).powi(3)).sum();
            assert!((s - 0.25).abs() < 1e-14, "m={m}");
        }
    }

    #[test]
    fn gauge_shift_examples() {
        assert_eq!(gauge_shift_closed(0, 0, [0.3, 0.1, 0.0], [0.2, 0.7, 0.0]), 0.0);
        assert_eq!(gauge_shift_closed(1, 0, [0.0; 3], [0.75, 0.25, 0.0]), 0.25);
        assert_eq!(gauge_shift_closed(0, 1, [0.75, 0.25, 0.0], [0.0; 3]), -0.25);
        let r = |n, d| Rational::new(n, d);
        let shift = gauge_shift_exact(
            3,
            -2,
            &[r(1, 2), r(1, 3), r(0, 1)],
            &[r(1, 5), r(1, 7), r(0, 1)],
        );
        // 3(1/5 − 1/7)/2 + 2(1/2 − 1/3)/2
        assert_eq!(shift, r(3, 35) + r(1, 6));
    }

    #[test]
    fn boundary_integral_examples() {
        let zero = NormalFormConnection::zero(Family::Elliptic);
        assert!(gauge_shift_boundary_integral(&zero, 16).unwrap().abs() < 1e-14);
        let e = |beta: [f64; 3]| NormalFormConnection::Elliptic {
            alpha: [0.3, -0.1, 0.4],
            beta,
        };
        let v = gauge_shift_boundary_integral(&e([1.0, 0.0, 0.0]), 64).unwrap();
        assert!((v - 0.5).abs() < 1e-8, "{v}");
        let v = gauge_shift_boundary_integral(&e([0.0, 1.0, 0.0]), 64).unwrap();
        assert!((v + 0.5).abs() < 1e-8, "{v}");
        assert!(gauge_shift_boundary_integral(&NormalFormConnection::zero(Family::Loxodromic), 16)
            .is_err());
    }

    #[test]
    fn path_json() {
        let text = r#"{"family":"elliptic","params":{"alpha1":{"kind":"linear","from":0,"to":1},"beta1":{"kind":"constant","value":1}}}"#;
        let path: ConnectionPath = serde_json::from_str(text).unwrap();
        assert_eq!(cs_delta_closed(&path).unwrap(), -0.5);
        let back: ConnectionPath =
            serde_json::from_str(&serde_json::to_string(&path).unwrap()).unwrap();
        assert_eq!(back, path);
        let short = r#"{"family":"elliptic","params":{"alpha1":{"kind":"samples","values":[0,1]}}}"#;
        assert!(serde_json::from_str::<ConnectionPath>(short).is_err());
        let wrong = r#"{"family":"loxodromic","params":{"alpha1":{"kind":"constant","value":1}}}"#;
        assert!(serde_json::from_str::<ConnectionPath>(wrong).is_err());
    }

    #[test]
    fn exact_linear_variation() {
        let r = |n, d| Rational::new(n, d);
        let z = || [r(0, 1), r(0, 1), r(0, 1)];
        let a1 = [r(1, 1), r(0, 1), r(0, 1)];
        let b = [r(1, 1), r(0, 1), r(0, 1)];
        // α1: 0 → 1, β1 ≡ 1
        assert_eq!(elliptic_linear_variation_exact((&z(), &b), (&a1, &b)), r(-1, 2));
    }
}
