//! Exact Chern–Simons invariants of representations of Seifert fibered
//! homology sphere groups into `G`.
//!
//! For `Σ(a_1, …, a_n)` with `π_1 = ⟨x_1, …, x_n, h | h central,
//! x_i^{a_i} h^{b_i} = x_1⋯x_n = 1⟩`, a representation is described up to
//! conjugacy by rational angle data
//!
//! ```text
//! ρ(h)   = (diag(e^{2πi p_0}, e^{2πi q_0}, e^{2πi r_0}), 2π(p_0+q_0+r_0), 2π r_0)
//! ρ(x_i) ~ (diag(e^{2πi p_i}, e^{2πi q_i}, e^{2πi r_i}), 2π(p_i+q_i+r_i), 2π r_i)
//! ```
//!
//! subject to `a_i p_i + b_i p_0 = s_i ∈ Z`, `a_i q_i + b_i q_0 = −s_i` and
//! `a_i r_i + b_i r_0 = 0`. The invariant is
//! `cs(ρ) ≡ ½ a ((Σp_i)² + (Σq_i)² + (Σr_i)²) mod Z` with `a = a_1⋯a_n`.
//!
//! Everything here is exact rational arithmetic.

mod fixtures;
mod lift;
mod pipeline;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{mod_z, ModZ, Rational};

pub use fixtures::{sigma_2_3_11, sigma_2_3_11_fixture, FixtureCase};
pub use lift::{
    canonical_lift_data, central_shift, global_swap, lift_shift, make_random_rep, rep_from_draw,
    CentralAngles, GeneratorAngles, RepDraw,
};
pub use pipeline::{cs_pipeline, pipeline_trace, PipelineTrace};

/// Constraint names used in validation reports and errors.
pub mod constraint {
    pub const CENTRAL_PQ: &str = "p_0-q_0 in Z";
    pub const CENTRAL_PR: &str = "p_0-r_0 in Z";
    pub const P_LIFT: &str = "a_ip_i+b_ip_0=s_i";
    pub const Q_LIFT: &str = "a_iq_i+b_iq_0=-s_i";
    pub const R_LIFT: &str = "a_ir_i+b_ir_0=0";
    pub const SUM_P: &str = "sum s_i/a_i = sum p_i + p_0/a";
    pub const SUM_Q: &str = "sum s_i/a_i = -sum q_i - q_0/a";
    pub const SUM_R: &str = "r_0 = -a sum r_i";
}

/// Seifert invariants `a_i` with presentation exponents `b_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertPresentation {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

fn check_invariants(a: &[i64]) -> Result<()> {
    if a.len() < 2 {
        return Err(Error::InvalidPresentation(format!(
            "need at least two Seifert invariants, got {}",
            a.len()
        )));
    }
    if let Some(x) = a.iter().find(|&&x| x <= 1) {
        return Err(Error::InvalidPresentation(format!("invariant {x} is not > 1")));
    }
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if a[i].gcd(&a[j]) != 1 {
                return Err(Error::NotCoprime(format!("gcd({}, {}) > 1", a[i], a[j])));
            }
        }
    }
    Ok(())
}

fn product(a: &[i64]) -> Result<i64> {
    a.iter().try_fold(1i64, |acc, &x| acc.checked_mul(x)).ok_or_else(|| {
        Error::InvalidPresentation("product of invariants overflows 64 bits".into())
    })
}

/// Exponents with `Σ b_i (a/a_i) = 1`, where `b_i` for `i < n` is the inverse
/// of `a/a_i` modulo `a_i` taken in `[−a_i/2, a_i/2)`, and `b_n` absorbs the
/// rest.
pub fn solve_b(a: &[i64]) -> Result<Vec<i64>> {
    check_invariants(a)?;
    let total = product(a)?;
    let n = a.len();
    let mut b = Vec::with_capacity(n);
    let mut acc: i128 = 0;
    for &ai in &a[..n - 1] {
        let cofactor = total / ai;
        let inv = cofactor.rem_euclid(ai).extended_gcd(&ai).x.rem_euclid(ai);
        // Representative in [−a_i/2, a_i/2).
        let bi = if 2 * inv >= ai { inv - ai } else { inv };
        acc += bi as i128 * cofactor as i128;
        b.push(bi);
    }
    let last = (total / a[n - 1]) as i128;
    let rest = 1 - acc;
    debug_assert_eq!(rest % last, 0);
    b.push((rest / last) as i64);
    Ok(b)
}

impl SeifertPresentation {
    /// Validates `n >= 3`, `a_i > 1`, pairwise coprimality and
    /// `Σ b_i/a_i = 1/a`.
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        let pres = SeifertPresentation { a, b };
        pres.validate()?;
        Ok(pres)
    }

    /// The presentation with exponents from [`solve_b`].
    pub fn from_invariants(a: Vec<i64>) -> Result<Self> {
        let b = solve_b(&a)?;
        Self::new(a, b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() < 3 {
            return Err(Error::InvalidPresentation(format!(
                "need at least three exceptional fibres, got {}",
                self.a.len()
            )));
        }
        check_invariants(&self.a)?;
        if self.b.len() != self.a.len() {
            return Err(Error::LengthMismatch {
                expected: self.a.len(),
                got: self.b.len(),
            });
        }
        let sum: Rational = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(&ai, &bi)| Rational::new(bi, ai))
            .sum();
        if sum != Rational::one() / self.order() {
            return Err(Error::InvalidPresentation(format!(
                "sum b_i/a_i = {sum}, expected 1/{}",
                self.order()
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `a = a_1⋯a_n` as an exact rational.
    pub fn order(&self) -> Rational {
        self.a.iter().map(|&x| Rational::from_integer(x)).fold(Rational::one(), |acc, x| acc * x)
    }
}

/// Exact angle data of a representation into `G`, in turns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedRepData {
    pub p0: Rational,
    pub q0: Rational,
    pub r0: Rational,
    pub p: Vec<Rational>,
    pub q: Vec<Rational>,
    pub r: Vec<Rational>,
    /// `s_i = a_i p_i + b_i p_0`; may be left empty on input and derived.
    #[serde(default, with = "integer_list")]
    pub s: Vec<BigInt>,
}

impl LiftedRepData {
    /// All angles zero: the trivial representation.
    pub fn trivial(n: usize) -> Self {
        LiftedRepData {
            p0: Rational::zero(),
            q0: Rational::zero(),
            r0: Rational::zero(),
            p: vec![Rational::zero(); n],
            q: vec![Rational::zero(); n],
            r: vec![Rational::zero(); n],
            s: vec![BigInt::from(0); n],
        }
    }

    /// Fills `s` from constraint (1) when every `a_i p_i + b_i p_0` is an
    /// integer; leaves it empty otherwise so validation reports the failure.
    pub fn with_derived_s(mut self, pres: &SeifertPresentation) -> Self {
        if self.p.len() == pres.n() {
            let s: Option<Vec<BigInt>> = (0..pres.n())
                .map(|i| {
                    let v = p_lift(pres, &self, i);
                    v.is_integer().then(|| v.numer().clone())
                })
                .collect();
            self.s = s.unwrap_or_default();
        }
        self
    }

    pub fn sum_p(&self) -> Rational {
        self.p.iter().sum()
    }

    pub fn sum_q(&self) -> Rational {
        self.q.iter().sum()
    }

    pub fn sum_r(&self) -> Rational {
        self.r.iter().sum()
    }
}

/// Integers as JSON numbers when they fit in 64 bits, strings otherwise.
mod integer_list {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], ser: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| x.to_i64().map_or_else(|| Repr::Big(x.to_string()), Repr::Small))
            .collect::<Vec<_>>()
            .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(de)?
            .into_iter()
            .map(|r| match r {
                Repr::Small(x) => Ok(BigInt::from(x)),
                Repr::Big(s) => s.trim().parse().map_err(de::Error::custom),
            })
            .collect()
    }
}

fn p_lift(pres: &SeifertPresentation, d: &LiftedRepData, i: usize) -> Rational {
    &d.p[i] * pres.a[i] + &d.p0 * pres.b[i]
}

fn q_lift(pres: &SeifertPresentation, d: &LiftedRepData, i: usize) -> Rational {
    &d.q[i] * pres.a[i] + &d.q0 * pres.b[i]
}

fn r_lift(pres: &SeifertPresentation, d: &LiftedRepData, i: usize) -> Rational {
    &d.r[i] * pres.a[i] + &d.r0 * pres.b[i]
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub constraint: String,
    /// 1-based generator index, for per-generator constraints.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn describe(&self) -> String {
        match self.index {
            Some(i) => format!("{} at i={i}: {}", self.constraint, self.detail),
            None => format!("{}: {}", self.constraint, self.detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `Err(InvalidRepData)` naming the first failed identity.
    pub fn into_result(self) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::InvalidRepData {
                constraint: c.describe(),
            }),
        }
    }
}

/// Checks every identity of the lifted data exactly, including the derived
/// consequences `Σ s_i/a_i = Σp_i + p_0/a = −Σq_i − q_0/a` and
/// `r_0 = −a Σr_i`.
pub fn validate_rep(pres: &SeifertPresentation, data: &LiftedRepData) -> Result<ValidationReport> {
    let n = pres.n();
    for len in [data.p.len(), data.q.len(), data.r.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: len,
            });
        }
    }
    if !data.s.is_empty() && data.s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: data.s.len(),
        });
    }
    let mut checks = Vec::new();
    let mut push = |constraint: &str, index: Option<usize>, passed: bool, detail: String| {
        checks.push(Check {
            constraint: constraint.to_string(),
            index,
            passed,
            detail,
        })
    };
    let d_pq = &data.p0 - &data.q0;
    push(constraint::CENTRAL_PQ, None, d_pq.is_integer(), format!("p_0-q_0 = {d_pq}"));
    let d_pr = &data.p0 - &data.r0;
    push(constraint::CENTRAL_PR, None, d_pr.is_integer(), format!("p_0-r_0 = {d_pr}"));

    let mut s_values = Vec::with_capacity(n);
    for i in 0..n {
        let pl = p_lift(pres, data, i);
        let ql = q_lift(pres, data, i);
        let rl = r_lift(pres, data, i);
        let s = match data.s.get(i) {
            Some(s) => Rational::from_bigint(s.clone()),
            None => pl.clone(),
        };
        let p_ok = pl.is_integer() && pl == s;
        push(
            constraint::P_LIFT,
            Some(i + 1),
            p_ok,
            format!("a_ip_i+b_ip_0 = {pl}, s_i = {s}"),
        );
        let q_ok = s.is_integer() && ql == -&s;
        push(
            constraint::Q_LIFT,
            Some(i + 1),
            q_ok,
            format!("a_iq_i+b_iq_0 = {ql}, -s_i = {}", -&s),
        );
        push(
            constraint::R_LIFT,
            Some(i + 1),
            rl.is_zero(),
            format!("a_ir_i+b_ir_0 = {rl}"),
        );
        s_values.push(s);
    }

    let order = pres.order();
    let s_over_a: Rational = s_values
        .iter()
        .zip(&pres.a)
        .map(|(s, &ai)| s / Rational::from_integer(ai))
        .sum();
    let rhs_p = data.sum_p() + &data.p0 / &order;
    push(
        constraint::SUM_P,
        None,
        s_over_a == rhs_p,
        format!("{s_over_a} vs {rhs_p}"),
    );
    let rhs_q = -data.sum_q() - &data.q0 / &order;
    push(
        constraint::SUM_Q,
        None,
        s_over_a == rhs_q,
        format!("{s_over_a} vs {rhs_q}"),
    );
    let rhs_r = -(&order * data.sum_r());
    push(
        constraint::SUM_R,
        None,
        data.r0 == rhs_r,
        format!("r_0 = {}, -a sum r_i = {rhs_r}", data.r0),
    );
    Ok(ValidationReport { checks })
}

/// `½ a ((Σp)² + (Σq)² + (Σr)²)` before reduction mod Z.
pub fn cs_closed_unreduced(pres: &SeifertPresentation, data: &LiftedRepData) -> Result<Rational> {
    validate_rep(pres, data)?.into_result()?;
    let (sp, sq, sr) = (data.sum_p(), data.sum_q(), data.sum_r());
    Ok(pres.order() * (&sp * &sp + &sq * &sq + &sr * &sr) * Rational::new(1, 2))
}

/// The closed formula for `cs(ρ)`, reduced to `[0, 1)`.
pub fn cs_closed(pres: &SeifertPresentation, data: &LiftedRepData) -> Result<ModZ> {
    Ok(mod_z(&cs_closed_unreduced(pres, data)?))
}

/// `μ ≡ −cs mod Z`.
pub fn burns_epstein(cs: &ModZ) -> ModZ {
    cs.negate()
}
